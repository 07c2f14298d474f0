#pragma once

#include "harnacklab/grid.hpp"
#include "harnacklab/manifold.hpp"

// Covariant differential operators on grid models, reported in the
// orthonormal frame. Convention: (grad X)(i,j) = <nabla_{e_i} X, e_j>, so the
// adjoint (grad X)* is the plain matrix transpose. Vector fields are stored
// in frame components. The sphere has no grid and is rejected.

namespace harnack {

VectorGridField covariant_gradient(const ManifoldModel& model, const ScalarGridField& f);
MatrixGridField covariant_hessian(const ManifoldModel& model, const ScalarGridField& f);
ScalarGridField covariant_laplacian(const ManifoldModel& model, const ScalarGridField& f);
MatrixGridField covariant_grad_vector(const ManifoldModel& model, const VectorGridField& x);
ScalarGridField covariant_divergence(const ManifoldModel& model, const VectorGridField& x);
// (grad M)(m,i,j) = <(nabla_{e_m} M) e_i, e_j> for a rank-2 field in frame components
Tensor3GridField covariant_grad_matrix(const ManifoldModel& model, const MatrixGridField& m);

}  // namespace harnack
