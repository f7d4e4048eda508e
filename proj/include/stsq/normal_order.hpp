#pragma once

// Normal-ordered polynomial algebra for one and two bosonic modes.
//
// A polynomial is stored as a map from normal-ordered monomials
// (creation-power, annihilation-power) to complex coefficients. Products are
// reduced with the reordering identity
//   a^n a†^m = sum_k k! C(n,k) C(m,k) a†^{m-k} a^{n-k},
// which keeps every intermediate normal-ordered. Coherent-state expectations
// then follow directly from <a†^m a^n> = conj(z)^m z^n.

#include <array>
#include <map>
#include <utility>

#include "stsq/errors.hpp"
#include "stsq/types.hpp"

namespace stsq {

namespace detail {
inline double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * double(n - i) / double(i + 1);
    return r;
}
inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= double(i);
    return r;
}
// Integer powers of a complex number, exact repeated product.
inline cd ipow(cd z, int p) {
    cd r(1.0, 0.0);
    for (int i = 0; i < p; ++i) r *= z;
    return r;
}
}  // namespace detail

class ModePoly {
  public:
    using Key = std::pair<int, int>;  // (creation power m, annihilation power n)

    ModePoly() = default;

    static ModePoly constant(cd c) {
        ModePoly p;
        p.add(0, 0, c);
        return p;
    }
    static ModePoly annihilation() {
        ModePoly p;
        p.add(0, 1, cd(1.0, 0.0));
        return p;
    }
    static ModePoly creation() {
        ModePoly p;
        p.add(1, 0, cd(1.0, 0.0));
        return p;
    }

    void add(int m, int n, cd coef) {
        if (coef == cd(0.0, 0.0)) return;
        auto [it, inserted] = terms_.try_emplace(Key{m, n}, coef);
        if (!inserted) {
            it->second += coef;
            if (it->second == cd(0.0, 0.0)) terms_.erase(it);
        }
    }

    ModePoly operator+(const ModePoly& other) const {
        ModePoly r = *this;
        for (const auto& [k, c] : other.terms_) r.add(k.first, k.second, c);
        return r;
    }
    ModePoly operator-(const ModePoly& other) const {
        ModePoly r = *this;
        for (const auto& [k, c] : other.terms_) r.add(k.first, k.second, -c);
        return r;
    }
    ModePoly operator*(cd scale) const {
        ModePoly r;
        for (const auto& [k, c] : terms_) r.add(k.first, k.second, c * scale);
        return r;
    }

    // Normal-ordered product via the reordering identity.
    ModePoly operator*(const ModePoly& other) const {
        ModePoly r;
        for (const auto& [ka, ca] : terms_) {
            const int m1 = ka.first, n1 = ka.second;
            for (const auto& [kb, cb] : other.terms_) {
                const int m2 = kb.first, n2 = kb.second;
                const int kmax = std::min(n1, m2);
                for (int k = 0; k <= kmax; ++k) {
                    const double w = detail::factorial(k) * detail::binom(n1, k) * detail::binom(m2, k);
                    r.add(m1 + m2 - k, n1 + n2 - k, ca * cb * w);
                }
            }
        }
        return r;
    }

    ModePoly pow(int e) const {
        ModePoly r = constant(cd(1.0, 0.0));
        for (int i = 0; i < e; ++i) r = r * (*this);
        return r;
    }

    cd coherent_expectation(cd z) const {
        cd acc(0.0, 0.0);
        const cd zc = std::conj(z);
        for (const auto& [k, c] : terms_)
            acc += c * detail::ipow(zc, k.first) * detail::ipow(z, k.second);
        return acc;
    }

    const std::map<Key, cd>& terms() const { return terms_; }

  private:
    std::map<Key, cd> terms_;
};

class TwoModePoly {
  public:
    // (x creation, x annihilation, y creation, y annihilation)
    using Key = std::array<int, 4>;

    TwoModePoly() = default;

    static TwoModePoly constant(cd c) {
        TwoModePoly p;
        p.add({0, 0, 0, 0}, c);
        return p;
    }
    // Embed a single-mode polynomial acting on the x (mode=0) or y (mode=1) mode.
    static TwoModePoly embed(const ModePoly& poly, int mode) {
        TwoModePoly p;
        for (const auto& [k, c] : poly.terms()) {
            if (mode == 0)
                p.add({k.first, k.second, 0, 0}, c);
            else
                p.add({0, 0, k.first, k.second}, c);
        }
        return p;
    }

    void add(Key key, cd coef) {
        if (coef == cd(0.0, 0.0)) return;
        auto [it, inserted] = terms_.try_emplace(key, coef);
        if (!inserted) {
            it->second += coef;
            if (it->second == cd(0.0, 0.0)) terms_.erase(it);
        }
    }

    TwoModePoly operator+(const TwoModePoly& other) const {
        TwoModePoly r = *this;
        for (const auto& [k, c] : other.terms_) r.add(k, c);
        return r;
    }
    TwoModePoly operator-(const TwoModePoly& other) const {
        TwoModePoly r = *this;
        for (const auto& [k, c] : other.terms_) r.add(k, -c);
        return r;
    }
    TwoModePoly operator*(cd scale) const {
        TwoModePoly r;
        for (const auto& [k, c] : terms_) r.add(k, c * scale);
        return r;
    }

    // Product reorders the x and y factors independently (they commute).
    TwoModePoly operator*(const TwoModePoly& other) const {
        TwoModePoly r;
        for (const auto& [ka, ca] : terms_) {
            for (const auto& [kb, cb] : other.terms_) {
                const int kx_max = std::min(ka[1], kb[0]);
                const int ky_max = std::min(ka[3], kb[2]);
                for (int kx = 0; kx <= kx_max; ++kx) {
                    const double wx =
                        detail::factorial(kx) * detail::binom(ka[1], kx) * detail::binom(kb[0], kx);
                    for (int ky = 0; ky <= ky_max; ++ky) {
                        const double wy =
                            detail::factorial(ky) * detail::binom(ka[3], ky) * detail::binom(kb[2], ky);
                        r.add({ka[0] + kb[0] - kx, ka[1] + kb[1] - kx,
                               ka[2] + kb[2] - ky, ka[3] + kb[3] - ky},
                              ca * cb * (wx * wy));
                    }
                }
            }
        }
        return r;
    }

    cd coherent_expectation(cd zx, cd zy) const {
        cd acc(0.0, 0.0);
        const cd zxc = std::conj(zx);
        const cd zyc = std::conj(zy);
        for (const auto& [k, c] : terms_)
            acc += c * detail::ipow(zxc, k[0]) * detail::ipow(zx, k[1]) *
                   detail::ipow(zyc, k[2]) * detail::ipow(zy, k[3]);
        return acc;
    }

    const std::map<Key, cd>& terms() const { return terms_; }

  private:
    std::map<Key, cd> terms_;
};

}  // namespace stsq
