#pragma once
// Midpoint-quadrature norms and inner products used by the estimate checks.

#include "nschb/fields.hpp"

namespace nschb {

enum class NormKind { L2, L4, H1semi, H2, Linf };

double norm(const ScalarField& f, NormKind kind);
double norm(const MACVectorField& v, NormKind kind);

// max over cell pairs of |f(x)-f(y)| / |x-y|^gamma; exact for grids up to
// 48x48, stratified deterministic pair sampling above. gamma in (0,1).
double holder_seminorm(const ScalarField& f, double gamma);

// (sum |f|^4 dV + sum |grad f|^4 dV)^(1/4) with face-gradient quadrature.
double w14_norm(const ScalarField& f);

double mean(const ScalarField& f);
double inner(const ScalarField& a, const ScalarField& b);
double inner(const MACVectorField& a, const MACVectorField& b);

}  // namespace nschb
