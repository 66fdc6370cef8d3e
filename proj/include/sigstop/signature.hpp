#pragma once

// Truncated signatures of piecewise-linear paths.
//
// A signature of order N over R^d is stored as one flat graded array: level n
// occupies d^n consecutive slots, multi-indices (i1,...,in) in lexicographic
// order (i1 varies slowest). Level 0 is the scalar 1. Everything here is a
// template on the scalar type so the quadrature oracles in the tests can run
// in long double.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "sigstop/errors.hpp"

namespace sigstop {

using Index = Eigen::Index;

inline Index level_size(Index dimension, int level) {
    Index size = 1;
    for (int k = 0; k < level; ++k) size *= dimension;
    return size;
}

// Offset of level n inside the flat graded array.
inline Index level_offset(Index dimension, int level) {
    Index offset = 0;
    for (int k = 0; k < level; ++k) offset += level_size(dimension, k);
    return offset;
}

inline Index graded_length(Index dimension, int order) { return level_offset(dimension, order + 1); }

template <typename Scalar>
class Path {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    // values: one row per grid point, one column per coordinate.
    Path(Vector times, Matrix values) : times_(std::move(times)), values_(std::move(values)) {
        if (times_.size() < 2) throw InvalidArgument("path needs at least 2 points");
        if (values_.rows() != times_.size())
            throw InvalidArgument("path times and values have different lengths");
        if (values_.cols() < 1) throw InvalidArgument("path dimension must be >= 1");
        for (Index j = 1; j < times_.size(); ++j)
            if (!(times_[j] > times_[j - 1])) throw InvalidArgument("path times must be strictly increasing");
        if (!times_.allFinite() || !values_.allFinite()) throw InvalidArgument("path contains non-finite values");
    }

    // One-dimensional convenience constructor.
    static Path scalar(Vector times, const Vector& values) {
        Matrix m = values;
        return Path(std::move(times), std::move(m));
    }

    Index size() const { return times_.size(); }
    Index dimension() const { return values_.cols(); }
    const Vector& times() const { return times_; }
    const Matrix& values() const { return values_; }

    // Sub-path on grid points [first, last] inclusive.
    Path slice(Index first, Index last) const {
        if (first < 0 || last >= size() || last - first < 1)
            throw InvalidArgument("path slice must cover at least 2 points inside the path");
        const Index len = last - first + 1;
        return Path(times_.segment(first, len), values_.middleRows(first, len));
    }

private:
    Vector times_;
    Matrix values_;
};

// A path whose coordinate 0 is its own time grid.
template <typename Scalar>
class AugmentedPath {
public:
    explicit AugmentedPath(Path<Scalar> inner) : inner_(std::move(inner)) {
        if (inner_.dimension() < 2) throw InvalidArgument("augmented path needs time plus >= 1 coordinate");
        // Path already enforces strictly increasing times; coordinate 0 must also increase.
        for (Index j = 1; j < inner_.size(); ++j)
            if (!(inner_.values()(j, 0) > inner_.values()(j - 1, 0)))
                throw InvalidArgument("time coordinate of augmented path must be strictly increasing");
    }

    const Path<Scalar>& inner() const { return inner_; }
    Index size() const { return inner_.size(); }
    Index dimension() const { return inner_.dimension(); }

    AugmentedPath slice(Index first, Index last) const { return AugmentedPath(inner_.slice(first, last)); }

private:
    Path<Scalar> inner_;
};

// Prepends time as coordinate 0. With rescale_time the time coordinate is mapped
// affinely onto [0, 1]; the path's own time stamps are left untouched.
template <typename Scalar>
AugmentedPath<Scalar> augment(const Path<Scalar>& path, bool rescale_time = true) {
    using Matrix = typename Path<Scalar>::Matrix;
    const auto& t = path.times();
    Matrix values(path.size(), path.dimension() + 1);
    if (rescale_time) {
        const Scalar t0 = t[0];
        const Scalar span = t[t.size() - 1] - t0;
        values.col(0) = (t.array() - t0) / span;
    } else {
        values.col(0) = t;
    }
    values.rightCols(path.dimension()) = path.values();
    return AugmentedPath<Scalar>(Path<Scalar>(t, std::move(values)));
}

// Shared storage for graded arrays (signatures and their duals).
template <typename Scalar>
class GradedArray {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    GradedArray(Index dimension, int order)
        : dimension_(dimension), order_(order), coeffs_(Vector::Zero(graded_length(dimension, order))) {
        if (dimension < 1) throw InvalidArgument("dimension must be >= 1");
        if (order < 0) throw InvalidArgument("order must be >= 0");
    }
    GradedArray(Index dimension, int order, Vector coeffs)
        : dimension_(dimension), order_(order), coeffs_(std::move(coeffs)) {
        if (dimension < 1) throw InvalidArgument("dimension must be >= 1");
        if (order < 0) throw InvalidArgument("order must be >= 0");
        if (coeffs_.size() != graded_length(dimension, order))
            throw InvalidArgument("coefficient array length does not match (dimension, order)");
    }

    Index dimension() const { return dimension_; }
    int order() const { return order_; }
    Index size() const { return coeffs_.size(); }

    const Vector& coefficients() const { return coeffs_; }
    Vector& coefficients() { return coeffs_; }

    auto level(int n) const { return coeffs_.segment(level_offset(dimension_, n), level_size(dimension_, n)); }
    auto level(int n) { return coeffs_.segment(level_offset(dimension_, n), level_size(dimension_, n)); }

    bool same_shape(const GradedArray& other) const {
        return dimension_ == other.dimension_ && order_ == other.order_;
    }

protected:
    Index dimension_;
    int order_;
    Vector coeffs_;
};

template <typename Scalar>
class TruncatedSignature : public GradedArray<Scalar> {
public:
    using typename GradedArray<Scalar>::Vector;

    TruncatedSignature(Index dimension, int order, Vector coeffs)
        : GradedArray<Scalar>(dimension, order, std::move(coeffs)) {
        if (this->coeffs_[0] != Scalar(1)) throw InvalidArgument("signature level 0 must equal 1");
    }

    // Signature of the constant path: (1, 0, 0, ...).
    static TruncatedSignature unit(Index dimension, int order) {
        Vector c = Vector::Zero(graded_length(dimension, order));
        c[0] = Scalar(1);
        return TruncatedSignature(dimension, order, std::move(c));
    }
};

template <typename Scalar>
class DualVector : public GradedArray<Scalar> {
public:
    using typename GradedArray<Scalar>::Vector;
    using GradedArray<Scalar>::GradedArray;

    static DualVector zero(Index dimension, int order) { return DualVector(dimension, order); }
};

using Pathd = Path<double>;
using AugmentedPathd = AugmentedPath<double>;
using Signatured = TruncatedSignature<double>;
using DualVectord = DualVector<double>;

// Dense n-way tensor; data is row-major (first index varies slowest).
template <typename Scalar>
struct DenseTensor {
    std::vector<Index> shape;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> data;

    Scalar operator()(std::initializer_list<Index> idx) const {
        Index flat = 0;
        auto s = shape.begin();
        for (Index i : idx) flat = flat * *s++ + i;
        return data[flat];
    }
};

namespace detail {

// out += a (x) b on flat lexicographic layouts.
template <typename Scalar, typename OutSeg, typename ASeg, typename BSeg>
void accumulate_outer(OutSeg&& out, const ASeg& a, const BSeg& b) {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::Map<Matrix> view(out.data(), b.size(), a.size());
    view.noalias() += b * a.transpose();
}

}  // namespace detail

template <typename Scalar>
DenseTensor<Scalar> tensor_product(std::initializer_list<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> factors) {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    if (factors.size() == 0) throw InvalidArgument("tensor product needs at least one factor");
    DenseTensor<Scalar> out;
    out.data = Vector::Ones(1);
    for (const Vector& f : factors) {
        if (f.size() == 0) throw InvalidArgument("tensor product of an empty vector");
        if (!f.allFinite()) throw InvalidArgument("tensor product of a non-finite vector");
        Vector next = Vector::Zero(out.data.size() * f.size());
        detail::accumulate_outer<Scalar>(next, out.data, f);
        out.data = std::move(next);
        out.shape.push_back(f.size());
    }
    return out;
}

template <typename Scalar>
DenseTensor<Scalar> tensor_product(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u,
                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
    return tensor_product<Scalar>({u, v});
}

// Signature of one linear segment: level n is increment^{(x)n} / n!.
template <typename Scalar, typename Derived>
TruncatedSignature<Scalar> segment_signature(const Eigen::MatrixBase<Derived>& increment, int order) {
    if (order < 1) throw InvalidArgument("truncation order must be >= 1");
    const Index d = increment.size();
    auto sig = TruncatedSignature<Scalar>::unit(d, order);
    sig.level(1) = increment.template cast<Scalar>();
    for (int n = 2; n <= order; ++n) {
        auto prev = sig.level(n - 1);
        auto cur = sig.level(n);
        Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> view(cur.data(), d, prev.size());
        view.noalias() = (increment.template cast<Scalar>() / Scalar(n)) * prev.transpose();
    }
    return sig;
}

// Truncated tensor-algebra product; the signature of a concatenated path.
template <typename Scalar>
TruncatedSignature<Scalar> chen_concat(const TruncatedSignature<Scalar>& a, const TruncatedSignature<Scalar>& b) {
    if (!a.same_shape(b)) throw InvalidArgument("chen_concat: signatures differ in (dimension, order)");
    auto out = TruncatedSignature<Scalar>::unit(a.dimension(), a.order());
    for (int n = 1; n <= a.order(); ++n) {
        auto level = out.level(n);
        level = a.level(n) + b.level(n);
        for (int k = 1; k < n; ++k) detail::accumulate_outer<Scalar>(level, a.level(k), b.level(n - k));
    }
    return out;
}

// In-place a <- a (x) exp(increment); same result as chen_concat with a segment
// signature but without materializing it (Horner over the exponential series).
template <typename Scalar, typename Derived>
void extend_by_segment(TruncatedSignature<Scalar>& a, const Eigen::MatrixBase<Derived>& increment) {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Index d = a.dimension();
    const Vector delta = increment.template cast<Scalar>();
    if (delta.size() != d) throw InvalidArgument("increment dimension does not match signature");
    // Highest level first so lower levels are still the old values when read.
    for (int n = a.order(); n >= 1; --n) {
        // acc_k = (acc_{k-1} + a_k) (x) delta / (n-k) with acc starting from a_0 = 1.
        Vector acc = delta / Scalar(n);
        for (int k = 1; k < n; ++k) {
            Vector next = Vector::Zero(acc.size() * d);
            Vector base = acc + a.level(k);
            detail::accumulate_outer<Scalar>(next, base, delta);
            acc = next / Scalar(n - k);
        }
        a.level(n) += acc;
    }
}

template <typename Scalar>
TruncatedSignature<Scalar> signature(const AugmentedPath<Scalar>& path, int order) {
    if (order < 1) throw InvalidArgument("truncation order must be >= 1");
    const auto& x = path.inner().values();
    auto sig = TruncatedSignature<Scalar>::unit(x.cols(), order);
    for (Index j = 1; j < x.rows(); ++j) extend_by_segment(sig, (x.row(j) - x.row(j - 1)).transpose());
    return sig;
}

// Element j is the signature over grid points [0, j]; element 0 is the unit.
template <typename Scalar>
std::vector<TruncatedSignature<Scalar>> prefix_signatures(const AugmentedPath<Scalar>& path, int order) {
    if (order < 1) throw InvalidArgument("truncation order must be >= 1");
    const auto& x = path.inner().values();
    std::vector<TruncatedSignature<Scalar>> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    auto sig = TruncatedSignature<Scalar>::unit(x.cols(), order);
    out.push_back(sig);
    for (Index j = 1; j < x.rows(); ++j) {
        extend_by_segment(sig, (x.row(j) - x.row(j - 1)).transpose());
        out.push_back(sig);
    }
    return out;
}

// Prefix signatures stacked row-wise: row j holds the flat graded array of prefix j.
template <typename Scalar>
class SignatureStream {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    SignatureStream(Index dimension, int order, Matrix rows)
        : dimension_(dimension), order_(order), rows_(std::move(rows)) {
        if (rows_.cols() != graded_length(dimension, order))
            throw InvalidArgument("signature stream width does not match (dimension, order)");
        if (rows_.rows() < 1) throw InvalidArgument("signature stream is empty");
    }

    static SignatureStream from(const AugmentedPath<Scalar>& path, int order) {
        auto prefixes = prefix_signatures(path, order);
        Matrix rows(static_cast<Index>(prefixes.size()), graded_length(path.dimension(), order));
        for (std::size_t j = 0; j < prefixes.size(); ++j)
            rows.row(static_cast<Index>(j)) = prefixes[j].coefficients().transpose();
        return SignatureStream(path.dimension(), order, std::move(rows));
    }

    static SignatureStream stack(const std::vector<TruncatedSignature<Scalar>>& prefixes) {
        if (prefixes.empty()) throw InvalidArgument("signature stream is empty");
        const auto& first = prefixes.front();
        Matrix rows(static_cast<Index>(prefixes.size()), first.size());
        for (std::size_t j = 0; j < prefixes.size(); ++j) {
            if (!prefixes[j].same_shape(first)) throw InvalidArgument("prefix signatures differ in shape");
            rows.row(static_cast<Index>(j)) = prefixes[j].coefficients().transpose();
        }
        return SignatureStream(first.dimension(), first.order(), std::move(rows));
    }

    Index dimension() const { return dimension_; }
    int order() const { return order_; }
    // Number of grid intervals n; the stream holds n + 1 prefixes.
    Index steps() const { return rows_.rows() - 1; }
    const Matrix& rows() const { return rows_; }

private:
    Index dimension_;
    int order_;
    Matrix rows_;
};

using SignatureStreamd = SignatureStream<double>;

template <typename Scalar>
Scalar pair(const DualVector<Scalar>& l, const TruncatedSignature<Scalar>& s) {
    if (!l.same_shape(s)) throw InvalidArgument("pair: dual vector and signature differ in (dimension, order)");
    return l.coefficients().dot(s.coefficients());
}

}  // namespace sigstop
