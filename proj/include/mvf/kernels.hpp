#pragma once

#include "mvf/green.hpp"

namespace mvf {

// What to do where the (horizontal) gradient of Gamma* vanishes.
enum class ZeroGradient { Zero, Throw };

// <A grad, grad> / |grad|, grad = grad_x Gamma*(x, x0). Valid for N >= 2.
double kernel_K(const GreenFunction& g, const Vec& x0, const Vec& x, ZeroGradient conv = ZeroGradient::Zero);
// N/(N-2) <A grad, grad> / Gamma*^{2(N-1)/(N-2)}, N >= 3.
double kernel_M(const GreenFunction& g, const Vec& x0, const Vec& x);
// The planar pair: K2 = K, M2 = 2 <A grad, grad> / exp(2 Gamma*).
double kernel_K2(const GreenFunction& g, const Vec& x0, const Vec& x, ZeroGradient conv = ZeroGradient::Zero);
double kernel_M2(const GreenFunction& g, const Vec& x0, const Vec& x);
// Horizontal versions with Q in place of N.
double kernel_KG(const GreenFunction& g, const Vec& x0, const Vec& x, ZeroGradient conv = ZeroGradient::Zero);
double kernel_MG(const GreenFunction& g, const Vec& x0, const Vec& x);

// Dispatch on the setting of g.
double surface_kernel(const GreenFunction& g, const Vec& x0, const Vec& x);
double volume_kernel(const GreenFunction& g, const Vec& x0, const Vec& x);
// Order of the pole of the volume kernel at x0 (0 when bounded).
double volume_kernel_singularity(const GreenFunction& g);

}  // namespace mvf
