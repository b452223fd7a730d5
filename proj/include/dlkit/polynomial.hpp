#pragma once
#include <map>
#include <vector>
#include <string>
#include <cmath>

namespace dlkit {

// multivariate polynomial with exact derivatives; doubles as the TestFunction type
class Polynomial {
public:
    using Exponents = std::vector<int>;

    Polynomial() = default;
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, double c);
    static Polynomial variable(int nvars, int i);
    static Polynomial linear(const std::vector<double>& a, double c0 = 0.0);

    void add_term(const Exponents& e, double c);
    int nvars() const { return nvars_; }
    int degree() const;
    const std::map<Exponents, double>& terms() const { return terms_; }

    Polynomial derivative(int i) const;
    // x_i -> y_i^2 / 4
    Polynomial substitute_half_square() const;

    double operator()(const std::vector<double>& x) const { return evaluate(x); }
    std::vector<double> gradient(const std::vector<double>& x) const;
    std::vector<std::vector<double>> hessian(const std::vector<double>& x) const;

    template <class T>
    T evaluate(const std::vector<T>& x) const {
        T acc = T(0.0);
        for (const auto& [e, c] : terms_) {
            T term = T(c);
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) term = term * x[i];
            acc = acc + term;
        }
        return acc;
    }

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;

    std::string to_string() const;

private:
    int nvars_ = 0;
    std::map<Exponents, double> terms_;
};

using TestFunction = Polynomial;

// second order forward jet: value, gradient and Hessian in n seed directions
struct Jet2 {
    double v = 0;
    std::vector<double> g;
    std::vector<double> h;  // row-major n x n

    Jet2() = default;
    Jet2(double c) : v(c) {}
    static Jet2 seed(int n, int i, double value);
    int dim() const { return static_cast<int>(g.size()); }
    double hess(int i, int j) const { return h.empty() ? 0.0 : h[i * dim() + j]; }
    double grad(int i) const { return g.empty() ? 0.0 : g[i]; }
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);
Jet2 log(const Jet2& a);

std::vector<Jet2> seed_jets(const std::vector<double>& x);

}
