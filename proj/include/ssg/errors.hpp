#pragma once

#include <stdexcept>
#include <string>

namespace ssg {

// Base for all numerical-domain errors.  code() is the stable identifier the
// CLI prints on stderr (exit code 3 paths).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Truncated constraint directions are (numerically) linearly dependent:
// the Gram matrix of the (w_i)_(N) has an eigenvalue below threshold.
class SingularGram : public Error {
public:
    explicit SingularGram(const std::string& what) : Error("SingularGram", what) {}
};

// The coordinate projection fails to map ker Q_N onto R^k: the marginal
// covariance is singular.
class NotTransversal : public Error {
public:
    explicit NotTransversal(const std::string& what) : Error("NotTransversal", what) {}
};

// The affine subspace misses the sphere: N <= |z0N|^2.
class EmptySlice : public Error {
public:
    explicit EmptySlice(const std::string& what) : Error("EmptySlice", what) {}
};

// The two independent routes to the marginal covariance disagree.
class FormulaMismatch : public Error {
public:
    explicit FormulaMismatch(const std::string& what) : Error("FormulaMismatch", what) {}
};

// Adaptive integration exhausted its refinement budget above tolerance.
class ToleranceNotReached : public Error {
public:
    explicit ToleranceNotReached(const std::string& what) : Error("ToleranceNotReached", what) {}
};

// Constraint set rejected at admission (non-orthonormal directions, bad tail).
class InvalidConstraintSet : public Error {
public:
    explicit InvalidConstraintSet(const std::string& what) : Error("InvalidConstraintSet", what) {}
};

}  // namespace ssg
