#pragma once

// Shared helpers for the test suites: a seeded RNG (STEADYKERNEL_SEED
// overrides the default so randomized failures are reproducible) and
// generators for random expressions and networks.

#include <cstdlib>
#include <random>
#include <string>

#include <steadykernel/symexpr.hpp>

namespace testutil {

using steadykernel::Monomial;
using steadykernel::Polynomial;
using steadykernel::Rational;
using steadykernel::RationalExpr;

inline std::uint64_t test_seed() {
    if (const char* env = std::getenv("STEADYKERNEL_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
    }
    return 20260819ULL;
}

inline std::mt19937_64 make_rng(std::uint64_t salt = 0) {
    return std::mt19937_64(test_seed() ^ (salt * 0x9e3779b97f4a7c15ULL));
}

inline Polynomial random_polynomial(std::mt19937_64& rng, int max_terms = 4,
                                    int max_vars = 3, int max_exp = 2) {
    static const char* pool[] = {"a", "b", "c", "d", "e"};
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> nvars(0, max_vars);
    std::uniform_int_distribution<int> var(0, 4);
    std::uniform_int_distribution<int> exp(1, max_exp);
    Polynomial p;
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        Monomial m;
        int v = nvars(rng);
        for (int j = 0; j < v; ++j) m = m * Monomial::var(pool[var(rng)], exp(rng));
        p += Polynomial::term(coeff(rng), m);
    }
    return p;
}

inline Polynomial random_nonzero_polynomial(std::mt19937_64& rng, int max_terms = 4) {
    for (;;) {
        Polynomial p = random_polynomial(rng, max_terms);
        if (!p.is_zero()) return p;
    }
}

inline RationalExpr random_rational_expr(std::mt19937_64& rng) {
    return RationalExpr(random_polynomial(rng), random_nonzero_polynomial(rng));
}

inline std::map<std::string, Rational> random_positive_bindings(
    std::mt19937_64& rng, const std::set<std::string>& symbols, int max_num = 8) {
    std::uniform_int_distribution<int> num(1, max_num);
    std::uniform_int_distribution<int> den(1, 4);
    std::map<std::string, Rational> b;
    for (const auto& s : symbols) b[s] = Rational(num(rng), den(rng));
    return b;
}

}  // namespace testutil
