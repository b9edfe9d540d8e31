#pragma once

#include <functional>

#include "finsler/metric.hpp"

namespace finsler {

// Legendre transform L(y)_i = F [F]_{y^i} = g_y(y, .) and its inverse,
// plus the gradient / Hessian / Laplacian calculus built on them.

Vec legendre(const Metric& m, const Vec& x, const Vec& y);

struct NewtonOptions {
  double tol_rel = 1e-14;       // target residual, relative to |xi|
  double accept_rel = 1e-10;    // worst residual accepted before throwing
  int max_iters = 50;
  int max_halvings = 40;
  // false forces the generic Euclidean/Riemannian raise as the start, so the
  // solve stays independent of a model's closed-form inverse.
  bool use_model_initial_guess = true;
};

Vec legendre_inverse(const Metric& m, const Vec& x, const Vec& xi,
                     const NewtonOptions& opt = {});

double dual_norm(const Metric& m, const Vec& x, const Vec& xi,
                 const NewtonOptions& opt = {});

// Reverse metric <-F(x,y) = F(x,-y). Reversible models are their own reverse;
// reversing twice returns the original kernel.
Metric reverse_model(const Metric& m);

// eta_- = L^{-1}(-L eta) / F*(-L eta) for a unit vector eta.
Vec eta_minus(const Metric& m, const Vec& x, const Vec& eta);

Vec gradient(const Metric& m, const ScalarField& f, const Vec& x);

// nabla^2 f as the endomorphism X -> D^{grad f}_X (grad f); entries H^i_j.
Mat hessian(const Metric& m, const ScalarField& f, const Vec& x, double fd_step_scale = 1e-5);

double laplacian(const Metric& m, const VolumeForm& vol, const ScalarField& f, const Vec& x,
                 double fd_step_scale = 1e-5);

}  // namespace finsler
