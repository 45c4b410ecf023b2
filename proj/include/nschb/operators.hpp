#pragma once
// Discrete differential operators on the MAC staggering. div and grad are
// exact adjoints (up to sign) under the discrete inner products, which is what
// makes the discrete energy identities mirror the continuous integration by
// parts. laplacian(f) equals div(grad(f)) identically.

#include <vector>

#include "nschb/fields.hpp"

namespace nschb {

enum class ConvectionScheme { Upwind, Centered };

// Second-order centered face gradient of a cell field; boundary-face values
// follow the field's ghost extension (0 for Neumann, one-sided for Dirichlet).
MACVectorField grad(const ScalarField& f);

// Cell-centered divergence of a face field.
ScalarField div(const MACVectorField& v);

// 5-point Laplacian with bc-consistent ghosts; identical to div(grad(f)).
ScalarField laplacian(const ScalarField& f);

// Convective tendency -div(v f) in conservative flux form. Upwind face values
// are monotone; Centered is second order. Warns on stderr (once) if the input
// velocity is visibly non-solenoidal.
ScalarField advect(const ScalarField& f, const MACVectorField& v, ConvectionScheme scheme);

// Symmetric gradient D = (grad u + grad u^T)/2; diagonal at cells,
// off-diagonal at nodes (xy == yx).
TensorField sym_grad(const MACVectorField& v);

// Full velocity gradient: xx = dx(ux), yy = dy(uy) at cells; xy = dy(ux),
// yx = dx(uy) at nodes.
TensorField grad_tensor(const MACVectorField& v);

// Skew-symmetric (energy-neutral) discretization of (u . grad)u on faces;
// average of the divergence and advective forms. Boundary faces get 0.
MACVectorField momentum_advection(const MACVectorField& u);

// div(2 nu D(u)) to faces; nu at cells plus precomputed node values.
MACVectorField viscous_divergence(const MACVectorField& u, const ScalarField& nu_cells,
                                  const std::vector<double>& nu_nodes);

// div(kappa grad theta) at cells; kappa is a cell field whose ghost extension
// supplies wall-face values.
ScalarField kappa_diffusion(const ScalarField& theta, const ScalarField& kappa);

// Node values of a cell field by ghost-aware 4-cell averaging.
std::vector<double> cell_to_node(const ScalarField& f);

// Quadrature weight of node (i,j): dV, halved per boundary direction.
double node_weight(const Grid& g, int i, int j);

}  // namespace nschb
