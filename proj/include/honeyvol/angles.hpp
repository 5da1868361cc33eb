#pragma once
// Conjugacy classes of U(n)/SU(n): angle vectors in turns, the alcove
// parametrization, Vandermonde factor, and slice sampling.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "honeyvol/rational.hpp"
#include "honeyvol/rng.hpp"

namespace hv {

struct NotRegular : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateBoundary : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kRegularityEps = 1e-9;  // minimum pairwise gap, turns

// Weakly decreasing angles in [0,1) (turn units). Carries an optional exact
// rational representation; conversion between the two is always explicit.
class AngleVector {
  public:
    AngleVector() = default;

    static AngleVector from_doubles(std::vector<double> v) {
        AngleVector av;
        av.vals_ = std::move(v);
        return av;
    }
    static AngleVector from_rats(std::vector<Rat> v) {
        AngleVector av;
        av.ex_ = std::move(v);
        av.vals_.reserve(av.ex_.size());
        for (const auto& r : av.ex_) av.vals_.push_back(to_double(r));
        return av;
    }

    int n() const { return static_cast<int>(vals_.size()); }
    bool exact() const { return !ex_.empty(); }
    double operator[](int i) const { return vals_[i]; }
    const std::vector<double>& vals() const { return vals_; }
    const std::vector<Rat>& rats() const {
        if (!exact()) throw std::logic_error("no exact representation");
        return ex_;
    }

    double sum() const {
        double s = 0;
        for (double x : vals_) s += x;
        return s;
    }
    Rat sum_exact() const {
        Rat s = 0;
        for (const auto& x : rats()) s += x;
        return s;
    }

    bool sorted_in_range() const {
        for (int i = 0; i < n(); ++i) {
            if (vals_[i] < 0.0 || vals_[i] >= 1.0) return false;
            if (i > 0 && vals_[i - 1] < vals_[i]) return false;
        }
        return true;
    }
    bool regular(double eps = kRegularityEps) const {
        if (!sorted_in_range()) return false;
        for (int i = 1; i < n(); ++i)
            if (vals_[i - 1] - vals_[i] < eps) return false;
        return true;
    }
    // Regular and the angle sum is an integer (SU-regularity).
    bool su_regular(double eps = kRegularityEps) const {
        if (!regular(eps)) return false;
        if (exact()) {
            Rat s = sum_exact();
            return denominator(s) == 1;
        }
        double s = sum();
        return std::fabs(s - std::round(s)) < 1e-9;
    }

    AngleVector to_float() const { return from_doubles(vals_); }

    std::string str() const {
        std::ostringstream os;
        for (int i = 0; i < n(); ++i) {
            if (i) os << ",";
            if (exact())
                os << ex_[i];
            else
                os << vals_[i];
        }
        return os.str();
    }

  private:
    std::vector<double> vals_;
    std::vector<Rat> ex_;
};

// "14/23,7/23,2/23" or decimals.
inline AngleVector parse_angles(const std::string& s) {
    std::vector<Rat> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_rat(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty angle vector: " + s);
    return AngleVector::from_rats(out);
}

inline double frac01(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;  // guard rounding at exactly 1
    return f;
}
inline Rat frac01(const Rat& x) {
    Int fl = numerator(x) / denominator(x);
    if (x < 0 && fl * denominator(x) != numerator(x)) fl -= 1;
    return x - Rat(fl);
}

// Reduce each entry mod 1 into [0,1), then sort decreasing.
inline AngleVector standardize(const std::vector<double>& v) {
    std::vector<double> w(v.size());
    for (size_t i = 0; i < v.size(); ++i) w[i] = frac01(v[i]);
    std::sort(w.begin(), w.end(), std::greater<double>());
    return AngleVector::from_doubles(std::move(w));
}
inline AngleVector standardize(const std::vector<Rat>& v) {
    std::vector<Rat> w(v.size());
    for (size_t i = 0; i < v.size(); ++i) w[i] = frac01(v[i]);
    std::sort(w.begin(), w.end(), std::greater<Rat>());
    return AngleVector::from_rats(std::move(w));
}
inline AngleVector standardize(const AngleVector& a) {
    return a.exact() ? standardize(a.rats()) : standardize(a.vals());
}

// Vandermonde factor: 2^{n(n-1)/2} prod_{i<j} sin(pi (x_i - x_j)).
inline double vandermonde(const AngleVector& t) {
    double p = 1.0;
    for (int i = 0; i < t.n(); ++i)
        for (int j = i + 1; j < t.n(); ++j)
            p *= 2.0 * std::sin(M_PI * (t[i] - t[j]));
    return p;
}

// tilde(t) = (1 - t_n, ..., 1 - t_1).
inline AngleVector tilde(const AngleVector& t, bool strict = false) {
    if (t.n() > 0 && t[t.n() - 1] == 0.0) {
        if (strict) throw DegenerateBoundary("tilde at theta_n = 0");
        // fall through: mod-1 reduction via standardize keeps the op total
    }
    if (t.exact()) {
        std::vector<Rat> w;
        for (int i = t.n() - 1; i >= 0; --i) w.push_back(Rat(1) - t.rats()[i]);
        return standardize(w);
    }
    std::vector<double> w;
    for (int i = t.n() - 1; i >= 0; --i) w.push_back(1.0 - t[i]);
    return standardize(w);
}

// Shift by -t(theta)/n (t = fractional part of the sum) so the sum becomes
// integral, then standardize; lands in the SU-regular set.
inline AngleVector hat(const AngleVector& t) {
    if (t.exact()) {
        Rat s = t.sum_exact();
        Rat shift = -frac01(s) / t.n();
        std::vector<Rat> w;
        for (const auto& x : t.rats()) w.push_back(x + shift);
        AngleVector out = standardize(w);
        if (!out.regular()) throw DegenerateBoundary("hat created a tie");
        return out;
    }
    double s = t.sum();
    double shift = -frac01(s) / t.n();
    std::vector<double> w;
    for (double x : t.vals()) w.push_back(x + shift);
    AngleVector out = standardize(w);
    if (!out.regular()) throw DegenerateBoundary("hat created a tie");
    return out;
}

// Alcove point: weakly decreasing, sum 0, t_1 - t_n <= 1.
struct AlcovePoint {
    std::vector<double> t;
    bool regular() const {
        for (size_t i = 1; i < t.size(); ++i)
            if (t[i - 1] - t[i] < kRegularityEps) return false;
        return t.front() - t.back() < 1.0 - kRegularityEps;
    }
};

// Piecewise-affine bijection from the regular alcove onto SU-regular classes:
// (1+t_{i+1},...,1+t_n, t_1,...,t_i) with i = #{strictly positive entries},
// then mod-1 standardization. Each affine piece is a coordinate permutation
// plus integer shifts, so it preserves Lebesgue measure.
inline AngleVector alcove_embed(const AlcovePoint& p) {
    if (!p.regular()) throw NotRegular("alcove point not regular");
    int n = static_cast<int>(p.t.size());
    int i = 0;
    while (i < n && p.t[i] > 0) ++i;
    std::vector<double> w;
    for (int j = i; j < n; ++j) w.push_back(1.0 + p.t[j]);
    for (int j = 0; j < i; ++j) w.push_back(p.t[j]);
    return standardize(w);
}

// Draw a point of the slice {u regular : |u| = residue mod 1}: n-1 free
// uniform coordinates, the last determined; the free parametrization covers
// each ordered point n! times, so the importance weight is 1/n!.
inline std::pair<AngleVector, double> slice_sample(int n, double residue, Rng& rng) {
    double nfact = 1.0;
    for (int i = 2; i <= n; ++i) nfact *= i;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> u(n);
        double s = 0;
        for (int i = 0; i + 1 < n; ++i) {
            u[i] = rng.uniform();
            s += u[i];
        }
        u[n - 1] = frac01(residue - s);
        AngleVector out = standardize(u);
        if (out.regular()) return {out, 1.0 / nfact};
    }
    throw NotRegular("slice_sample: persistent degenerate draws");
}

}  // namespace hv
