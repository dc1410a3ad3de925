#pragma once

#include "conslin/expr.hpp"

#include <mpfr.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace conslin {

/// Closed interval with MPFR endpoints, outward rounded.
class Interval {
public:
    static constexpr mpfr_prec_t kPrecision = 320;

    Interval();
    explicit Interval(const Rational& q);
    Interval(const Interval& o);
    Interval& operator=(const Interval& o);
    ~Interval();

    friend Interval operator+(const Interval& a, const Interval& b);
    friend Interval operator-(const Interval& a, const Interval& b);
    friend Interval operator*(const Interval& a, const Interval& b);
    friend Interval operator/(const Interval& a, const Interval& b);
    Interval powi(long n) const;
    Interval exp() const;
    Interval log() const;

    bool contains_zero() const;
    bool positive() const;
    bool negative() const;
    double width() const;
    double midpoint() const;
    std::string str() const;
    const mpfr_t& lo() const { return lo_; }
    const mpfr_t& hi() const { return hi_; }

private:
    mpfr_t lo_, hi_;
};

class ProbeDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UncoveredKernel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Values for symbols and jets. Arbitrary function terms get a deterministic
/// pseudo-random value from (name, derivative orders, argument values, seed),
/// so they act as independent generators without being listed.
struct ProbeAssignment {
    std::map<Expr, Rational, ExprLess> values;
    std::uint64_t function_seed = 0;
};

struct ProbeResult {
    bool exact = true;
    Rational value;
    Interval range;

    /// Exact zero, or an interval containing 0 narrower than 1e-40.
    bool is_zero() const;
    std::string str() const;
};

ProbeResult numeric_probe(const Expr& e, const ProbeAssignment& a);

/// Random positive rationals for every symbol and jet of `exprs`.
ProbeAssignment random_assignment(const std::vector<Expr>& exprs, std::uint64_t seed);

/// Evaluates e at every assignment. Points whose evaluation leaves the domain
/// yield nullopt. OpenMP-parallel; `probe_batch_serial` is the reference.
std::vector<std::optional<ProbeResult>> probe_batch(const Expr& e, const std::vector<ProbeAssignment>& points);
std::vector<std::optional<ProbeResult>> probe_batch_serial(const Expr& e, const std::vector<ProbeAssignment>& points);

/// True when e vanishes at all of `points` random assignments that are in the
/// domain (at least half of them must be).
bool probe_is_zero(const Expr& e, int points = 20, std::uint64_t seed = 1);

} // namespace conslin
