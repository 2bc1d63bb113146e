#pragma once

#include "remest/types.hpp"

namespace remest::special {

// Convergence control for the hypergeometric series.
struct SeriesControl {
    double rel_tol = 1e-12;  // in (0, 1e-6]
    int max_terms = 500;     // >= 50

    void validate() const {
        if (!(rel_tol > 0.0) || rel_tol > 1e-6)
            throw std::invalid_argument("SeriesControl: rel_tol must be in (0, 1e-6]");
        if (max_terms < 50)
            throw std::invalid_argument("SeriesControl: max_terms must be >= 50");
    }
};

// erfi and K contractually require |x| <= this; e^{x^2} leaves double range
// just above it.
inline constexpr double kErfiGuard = 26.0;

double erf(double x);
double erfi(double x);

// Dawson's function D(x) = e^{-x^2} int_0^x e^{t^2} dt and its integral
// G(x) = int_0^x D(t) dt. Both are stable for every finite x.
double dawson(double x);
double dawson_integral(double x);

// Q(x) = (sqrt(pi)/2) e^{x^2} erf(x)/x, Q(0) = 1. Even, strictly increasing
// on [0, inf).
double q_func(double x);

// K(x) = (sqrt(pi)/2) e^{-x^2} erfi(x)/x = D(x)/x, K(0) = 1. Even, strictly
// decreasing on [0, inf), positive.
double k_func(double x);

// Unique x >= 0 with Q(x) = y (y >= 1) resp. K(x) = y (y in (0, 1]).
double q_inverse(double y);
double k_inverse(double y);

// 2F2(1,1;3/2,2;z) and 2F2(1,1;3/2,2;z) - 1 (the latter avoids cancellation
// for small |z|).
double hyp2f2_1132_2(double z, const SeriesControl& ctl = {});
double hyp2f2_1132_2_m1(double z, const SeriesControl& ctl = {});

// Expected exit quantities of the centered process started at 0 with
// threshold |eps|: r1 is the mean exit time, r2 the mean integrated squared
// state up to exit. Both even, zero at 0.
double r1(double eps, const SourceParams& p, const SeriesControl& ctl = {});
double r2(double eps, const SourceParams& p, const SeriesControl& ctl = {});

// Antiderivative of the age penalty: r3(delta) = int_0^delta p(s) ds.
double r3(double delta, const SourceParams& p);

}  // namespace remest::special
