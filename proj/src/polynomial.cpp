#include "dlkit/polynomial.hpp"
#include "dlkit/errors.hpp"
#include <sstream>

namespace dlkit {

Polynomial Polynomial::constant(int nvars, double c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
    Polynomial p(nvars);
    Exponents e(nvars, 0);
    e[i] = 1;
    p.add_term(e, 1.0);
    return p;
}

Polynomial Polynomial::linear(const std::vector<double>& a, double c0) {
    int n = static_cast<int>(a.size());
    Polynomial p = constant(n, c0);
    for (int i = 0; i < n; ++i) p = p + variable(n, i) * a[i];
    return p;
}

void Polynomial::add_term(const Exponents& e, double c) {
    if (static_cast<int>(e.size()) != nvars_) throw SizeMismatch("exponent length differs from nvars");
    for (int k : e)
        if (k < 0) throw DomainError("negative exponent");
    if (c == 0.0) return;
    double& slot = terms_[e];
    slot += c;
    if (slot == 0.0) terms_.erase(e);
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int k : e) s += k;
        d = std::max(d, s);
    }
    return d;
}

Polynomial Polynomial::derivative(int i) const {
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        Exponents f = e;
        f[i] -= 1;
        p.add_term(f, c * e[i]);
    }
    return p;
}

Polynomial Polynomial::substitute_half_square() const {
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_) {
        Exponents f = e;
        int total = 0;
        for (auto& k : f) {
            total += k;
            k *= 2;
        }
        p.add_term(f, c * std::pow(0.25, total));
    }
    return p;
}

std::vector<double> Polynomial::gradient(const std::vector<double>& x) const {
    std::vector<double> g(nvars_);
    for (int i = 0; i < nvars_; ++i) g[i] = derivative(i)(x);
    return g;
}

std::vector<std::vector<double>> Polynomial::hessian(const std::vector<double>& x) const {
    std::vector<std::vector<double>> h(nvars_, std::vector<double>(nvars_));
    for (int i = 0; i < nvars_; ++i) {
        Polynomial di = derivative(i);
        for (int j = 0; j < nvars_; ++j) h[i][j] = di.derivative(j)(x);
    }
    return h;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial p = *this;
    if (p.nvars_ == 0) p.nvars_ = o.nvars_;
    for (const auto& [e, c] : o.terms_) p.add_term(e, c);
    return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial p(std::max(nvars_, o.nvars_));
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : o.terms_) {
            Exponents e(p.nvars_, 0);
            for (int i = 0; i < p.nvars_; ++i) e[i] = a[i] + b[i];
            p.add_term(e, ca * cb);
        }
    return p;
}

Polynomial Polynomial::operator*(double s) const {
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_) p.add_term(e, c * s);
    return p;
}

std::string Polynomial::to_string() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c;
        for (int i = 0; i < nvars_; ++i)
            if (e[i] > 0) os << "*x" << i << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
    }
    if (first) os << "0";
    return os.str();
}

Jet2 Jet2::seed(int n, int i, double value) {
    Jet2 j(value);
    j.g.assign(n, 0.0);
    j.h.assign(n * n, 0.0);
    j.g[i] = 1.0;
    return j;
}

namespace {

int common_dim(const Jet2& a, const Jet2& b) { return std::max(a.dim(), b.dim()); }

void widen(Jet2& a, int n) {
    if (a.dim() == n) return;
    a.g.assign(n, 0.0);
    a.h.assign(n * n, 0.0);
}

}

Jet2 operator+(const Jet2& a, const Jet2& b) {
    int n = common_dim(a, b);
    Jet2 r(a.v + b.v);
    widen(r, n);
    for (int i = 0; i < n; ++i) r.g[i] = a.grad(i) + b.grad(i);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.h[i * n + j] = a.hess(i, j) + b.hess(i, j);
    return r;
}

Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    r.v = -r.v;
    for (auto& x : r.g) x = -x;
    for (auto& x : r.h) x = -x;
    return r;
}

Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }

Jet2 operator*(const Jet2& a, const Jet2& b) {
    int n = common_dim(a, b);
    Jet2 r(a.v * b.v);
    widen(r, n);
    for (int i = 0; i < n; ++i) r.g[i] = a.grad(i) * b.v + a.v * b.grad(i);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r.h[i * n + j] = a.hess(i, j) * b.v + a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i) +
                             a.v * b.hess(i, j);
    return r;
}

Jet2 operator/(const Jet2& a, const Jet2& b) {
    // 1/b via chain rule then product
    int n = b.dim();
    Jet2 inv(1.0 / b.v);
    if (n > 0) {
        widen(inv, n);
        double d1 = -1.0 / (b.v * b.v);
        double d2 = 2.0 / (b.v * b.v * b.v);
        for (int i = 0; i < n; ++i) inv.g[i] = d1 * b.g[i];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) inv.h[i * n + j] = d1 * b.hess(i, j) + d2 * b.g[i] * b.g[j];
    }
    return a * inv;
}

Jet2 log(const Jet2& a) {
    Jet2 r(std::log(a.v));
    int n = a.dim();
    if (n == 0) return r;
    widen(r, n);
    double d1 = 1.0 / a.v, d2 = -1.0 / (a.v * a.v);
    for (int i = 0; i < n; ++i) r.g[i] = d1 * a.g[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.h[i * n + j] = d1 * a.hess(i, j) + d2 * a.g[i] * a.g[j];
    return r;
}

std::vector<Jet2> seed_jets(const std::vector<double>& x) {
    int n = static_cast<int>(x.size());
    std::vector<Jet2> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(Jet2::seed(n, i, x[i]));
    return out;
}

}
