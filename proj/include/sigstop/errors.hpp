#pragma once

#include <stdexcept>
#include <string>

namespace sigstop {

// Input that violates a documented precondition (shape mismatch, empty data, bad range).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed external input (CSV rows, JSON documents). Carries the 1-based line when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Well-formed input whose content fails validation (non-positive prices, duplicate dates).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TrainingDiverged : public std::runtime_error {
public:
    explicit TrainingDiverged(int iteration)
        : std::runtime_error("training diverged: non-finite loss at iteration " +
                             std::to_string(iteration)),
          iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

class FitDegenerate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonMeanReverting : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConstructionFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sigstop
