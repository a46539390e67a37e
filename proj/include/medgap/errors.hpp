#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace medgap {

// Base for all recoverable data/estimation errors. The bootstrap treats these
// as failed replicates; anything outside this hierarchy propagates.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed input schema: unknown column, non-binary group, role clashes.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Unparseable file content, with row/column location in the message.
class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Rank-deficient design; carries the first offending column index.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, Eigen::Index column)
        : Error(what), column_index(column) {}
    Eigen::Index column_index;
};

// Perfect or quasi-complete separation in a binary-response fit.
class SeparationError : public Error {
public:
    using Error::Error;
};

// Iterative fit did not converge; carries the last iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd last)
        : Error(what), last_iterate(std::move(last)) {}
    Eigen::VectorXd last_iterate;
};

// Listwise deletion or trimming left nothing to analyze.
class EmptySampleError : public Error {
public:
    using Error::Error;
};

// Bootstrap/Monte Carlo could not produce usable inference.
class InferenceError : public Error {
public:
    using Error::Error;
};

}  // namespace medgap
