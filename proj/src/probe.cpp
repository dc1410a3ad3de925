#include "conslin/probe.hpp"

#include <random>
#include <unordered_map>

namespace conslin {

Interval::Interval()
{
    mpfr_init2(lo_, kPrecision);
    mpfr_init2(hi_, kPrecision);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Rational& q)
{
    mpfr_init2(lo_, kPrecision);
    mpfr_init2(hi_, kPrecision);
    mpfr_set_q(lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, q.get_mpq_t(), MPFR_RNDU);
}

Interval::Interval(const Interval& o)
{
    mpfr_init2(lo_, kPrecision);
    mpfr_init2(hi_, kPrecision);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Interval& Interval::operator=(const Interval& o)
{
    if (this != &o) {
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
}

Interval::~Interval()
{
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

Interval operator+(const Interval& a, const Interval& b)
{
    Interval r;
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Interval operator-(const Interval& a, const Interval& b)
{
    Interval r;
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
}

Interval operator*(const Interval& a, const Interval& b)
{
    Interval r;
    mpfr_t t;
    mpfr_init2(t, Interval::kPrecision);
    const mpfr_t* xs[2] = {&a.lo_, &a.hi_};
    const mpfr_t* ys[2] = {&b.lo_, &b.hi_};
    bool first = true;
    for (auto x : xs)
        for (auto y : ys) {
            mpfr_mul(t, *x, *y, MPFR_RNDD);
            if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_mul(t, *x, *y, MPFR_RNDU);
            if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
            first = false;
        }
    mpfr_clear(t);
    return r;
}

Interval operator/(const Interval& a, const Interval& b)
{
    if (b.contains_zero()) throw ProbeDomainError("division by an interval containing zero");
    Interval inv;
    mpfr_ui_div(inv.lo_, 1, b.hi_, MPFR_RNDD);
    mpfr_ui_div(inv.hi_, 1, b.lo_, MPFR_RNDU);
    return a * inv;
}

Interval Interval::powi(long n) const
{
    if (n < 0) return Interval(Rational(1)) / powi(-n);
    Interval result(Rational(1));
    Interval base = *this;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

Interval Interval::exp() const
{
    Interval r;
    mpfr_exp(r.lo_, lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Interval Interval::log() const
{
    if (!positive()) throw ProbeDomainError("log of a non-positive value");
    Interval r;
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
bool Interval::positive() const { return mpfr_sgn(lo_) > 0; }
bool Interval::negative() const { return mpfr_sgn(hi_) < 0; }

double Interval::width() const
{
    mpfr_t t;
    mpfr_init2(t, kPrecision);
    mpfr_sub(t, hi_, lo_, MPFR_RNDU);
    double w = mpfr_get_d(t, MPFR_RNDU);
    mpfr_clear(t);
    return w;
}

double Interval::midpoint() const
{
    return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN));
}

std::string Interval::str() const
{
    char buf[128];
    mpfr_snprintf(buf, sizeof buf, "[%.20Re, %.20Re]", lo_, hi_);
    return buf;
}

bool ProbeResult::is_zero() const
{
    if (exact) return sgn(value) == 0;
    return range.contains_zero() && range.width() < 1e-40;
}

std::string ProbeResult::str() const { return exact ? value.get_str() : range.str(); }

namespace {

struct Value {
    bool exact = true;
    Rational q;
    Interval iv;

    static Value of(const Rational& r)
    {
        Value v;
        v.q = r;
        return v;
    }
    Interval interval() const { return exact ? Interval(q) : iv; }
};

Value inexact(Interval i)
{
    Value v;
    v.exact = false;
    v.iv = std::move(i);
    return v;
}

Rational rational_pow(const Rational& b, long n)
{
    if (n < 0) {
        if (sgn(b) == 0) throw ProbeDomainError("zero raised to a negative power");
        return rational_pow(1 / b, -n);
    }
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), b.get_num_mpz_t(), static_cast<unsigned long>(n));
    mpz_pow_ui(den.get_mpz_t(), b.get_den_mpz_t(), static_cast<unsigned long>(n));
    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::uint64_t fnv(std::uint64_t h, const std::string& s)
{
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class Evaluator {
public:
    explicit Evaluator(const ProbeAssignment& a) : a_(a) {}

    Value eval(const Expr& e)
    {
        auto it = memo_.find(e.get());
        if (it != memo_.end()) return it->second;
        Value v = compute(e);
        memo_.emplace(e.get(), v);
        return v;
    }

private:
    const ProbeAssignment& a_;
    std::unordered_map<const Node*, Value> memo_;

    Value compute(const Expr& e)
    {
        switch (e.kind()) {
        case Kind::Number: return Value::of(e.number());
        case Kind::Symbol:
        case Kind::Jet: {
            auto it = a_.values.find(e);
            if (it == a_.values.end()) throw UncoveredKernel("no value for " + to_string(e));
            return Value::of(it->second);
        }
        case Kind::Func: return function_value(e);
        case Kind::Add: {
            Value acc = Value::of(0);
            for (const auto& k : e.children()) {
                Value v = eval(k);
                if (acc.exact && v.exact) acc.q += v.q;
                else acc = inexact(acc.interval() + v.interval());
            }
            return acc;
        }
        case Kind::Mul: {
            Value acc = Value::of(1);
            for (const auto& k : e.children()) {
                Value v = eval(k);
                if (v.exact && sgn(v.q) == 0) return Value::of(0);
                if (acc.exact && v.exact) acc.q *= v.q;
                else acc = inexact(acc.interval() * v.interval());
            }
            return acc;
        }
        case Kind::Pow: return power(eval(e.children()[0]), e.exponent());
        case Kind::SymPow: {
            Value b = eval(e.children()[0]);
            Value s = eval(e.children()[1]);
            if (s.exact && s.q.get_den() == 1 && s.q.get_num().fits_slong_p())
                return power(b, s.q.get_num().get_si());
            if (b.exact && b.q == 1) return Value::of(1);
            Interval bi = b.interval();
            if (!bi.positive()) throw ProbeDomainError("symbolic power of a non-positive base");
            return inexact((s.interval() * bi.log()).exp());
        }
        case Kind::Exp: {
            Value a = eval(e.children()[0]);
            if (a.exact && sgn(a.q) == 0) return Value::of(1);
            return inexact(a.interval().exp());
        }
        case Kind::Log: {
            Value a = eval(e.children()[0]);
            if (a.exact) {
                if (sgn(a.q) <= 0) throw ProbeDomainError("log of a non-positive value");
                if (a.q == 1) return Value::of(0);
            }
            return inexact(a.interval().log());
        }
        }
        throw std::logic_error("unknown node kind");
    }

    Value power(const Value& b, long n)
    {
        if (b.exact) return Value::of(rational_pow(b.q, n));
        if (n < 0 && b.iv.contains_zero()) throw ProbeDomainError("negative power of a value near zero");
        return inexact(b.iv.powi(n));
    }

    Value function_value(const Expr& f)
    {
        std::uint64_t h = fnv(1469598103934665603ull ^ a_.function_seed, f.name());
        for (int o : f.orders()) h = fnv(h, std::to_string(o) + ";");
        for (const auto& arg : f.children()) {
            Value v = eval(arg);
            if (v.exact) {
                h = fnv(h, v.q.get_str() + "|");
            } else {
                // Rounded midpoint: equal arguments evaluated through different
                // trees agree to far more digits than this.
                char buf[64];
                mpfr_t m;
                mpfr_init2(m, Interval::kPrecision);
                mpfr_add(m, v.iv.lo(), v.iv.hi(), MPFR_RNDN);
                mpfr_div_ui(m, m, 2, MPFR_RNDN);
                mpfr_snprintf(buf, sizeof buf, "%.30Re|", m);
                mpfr_clear(m);
                h = fnv(h, buf);
            }
        }
        long num = static_cast<long>(h % 1999) - 999;
        if (num == 0) num = 1;
        long den = 1 + static_cast<long>((h >> 24) % 37);
        return Value::of(Rational(num, den));
    }
};

} // namespace

ProbeResult numeric_probe(const Expr& e, const ProbeAssignment& a)
{
    Evaluator ev(a);
    Value v = ev.eval(e);
    ProbeResult r;
    r.exact = v.exact;
    if (v.exact) {
        r.value = v.q;
        r.range = Interval(v.q);
    } else {
        r.range = v.iv;
    }
    return r;
}

ProbeAssignment random_assignment(const std::vector<Expr>& exprs, std::uint64_t seed)
{
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 17);
    std::uniform_int_distribution<long> num(1, 97);
    std::uniform_int_distribution<long> den(1, 13);
    ProbeAssignment a;
    a.function_seed = rng();
    for (const auto& e : exprs)
        for (const auto& atom : atoms(e)) {
            if (atom.kind() == Kind::Func || a.values.count(atom)) continue;
            Rational q(num(rng), den(rng));
            q.canonicalize();
            a.values.emplace(atom, q);
        }
    return a;
}

namespace {

std::optional<ProbeResult> try_probe(const Expr& e, const ProbeAssignment& a)
{
    try {
        return numeric_probe(e, a);
    } catch (const ProbeDomainError&) {
        return std::nullopt;
    }
}

} // namespace

std::vector<std::optional<ProbeResult>> probe_batch(const Expr& e, const std::vector<ProbeAssignment>& points)
{
    std::vector<std::optional<ProbeResult>> out(points.size());
    const long n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = try_probe(e, points[static_cast<std::size_t>(i)]);
    return out;
}

std::vector<std::optional<ProbeResult>> probe_batch_serial(const Expr& e, const std::vector<ProbeAssignment>& points)
{
    std::vector<std::optional<ProbeResult>> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(try_probe(e, p));
    return out;
}

bool probe_is_zero(const Expr& e, int points, std::uint64_t seed)
{
    std::vector<ProbeAssignment> pts;
    for (int i = 0; i < points; ++i) pts.push_back(random_assignment({e}, seed + static_cast<std::uint64_t>(i)));
    int evaluated = 0;
    for (const auto& r : probe_batch(e, pts)) {
        if (!r) continue;
        ++evaluated;
        if (!r->is_zero()) return false;
    }
    return 2 * evaluated >= points;
}

} // namespace conslin
