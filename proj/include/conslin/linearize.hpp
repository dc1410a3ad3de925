#pragma once

#include "conslin/conslaw.hpp"
#include "conslin/linops.hpp"
#include "conslin/mapping.hpp"
#include "conslin/matrix.hpp"

#include <string>
#include <vector>

namespace conslin {

/// The linear system L~ v = 0 behind a multiplier family: v^lambda written as
/// frame jets of the family's functions, and L~ over the frame.
struct AdjointSystem {
    std::vector<std::string> frame;
    std::vector<std::string> names;
    std::vector<Expr> definitions;
    LinearOperator op;
};

class Rejection : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ExtractionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinearizationCandidate {
    std::vector<std::string> frame;
    std::vector<Expr> X;
    Matrix A; // D_{x_j} X_i
    Expr J;
    Matrix QJ; // Q_nu^lambda * J, rows nu
    Matrix Q;
    LinearOperator ltilde;
    bool contact = false;

    std::vector<Expr> W;            // as extracted from the identity
    std::vector<Rational> w_scale;  // W_normalized = w_scale * W
    std::vector<Expr> W_normalized;
    std::vector<Expr> fluxes;       // Gamma_i of the augmented identity
};

Expr jacobian(const std::vector<Expr>& X, const PdeSystem& sys);

/// Recognizes the linearizable form Lambda_nu = v^lambda(X) Q_nu^lambda J.
LinearizationCandidate match_multiplier_form(const PdeSystem& sys, const MultiplierFamily& fam,
                                             const AdjointSystem& adj,
                                             AnsatzShape shape = AnsatzShape::General);

/// D_{X_i} expressed through D_{x_j}: D_X = (A^T)^{-1} D_x.
class FrameDerivative {
public:
    FrameDerivative(const std::vector<Expr>& X, const std::vector<std::string>& vars);
    Expr d(const Expr& e, std::size_t i) const;
    Expr d(const Expr& e, const std::vector<int>& orders) const;

private:
    std::vector<std::string> vars_;
    Matrix coef_; // coef_[i][j]: D_{X_i} = sum_j coef_[i][j] D_{x_j}
};

/// L~*[X] applied to W through the chain rule; one entry per column of L~.
std::vector<Expr> adjoint_action(const LinearizationCandidate& cand, const std::vector<Expr>& W,
                                 const std::vector<std::string>& vars);

/// Fills W (undetermined coefficients on Q G = L~*[X] W), its normalization
/// and the fluxes Gamma with V Q G J - W (L~V) J = Div Gamma.
void augmented_identity(LinearizationCandidate& cand, const PdeSystem& sys);

/// Scales each W^alpha so its leading coefficient has numerator 1.
void normalize_w(LinearizationCandidate& cand);

/// Residual of the augmented identity for arbitrary V (expected 0).
Expr augmented_residual(const LinearizationCandidate& cand, const PdeSystem& sys);

/// Q^T G - L~*[X] W per row, computed through E_V of the combination W.(L~V).
std::vector<Expr> euler_extraction_residuals(const LinearizationCandidate& cand, const PdeSystem& sys);

std::vector<std::string> target_variables(std::size_t n);
std::vector<std::string> target_dependents(std::size_t m);

/// z = X, w = W_normalized; contact when X or W involves first derivatives
/// (rho from D_x psi = rho . D_x phi).
Transformation build_mapping(const LinearizationCandidate& cand, const PdeSystem& sys);

/// Adjoint of L~ in (z, w), columns rescaled to the normalized W.
PdeSystem target_system(const LinearizationCandidate& cand, const PdeSystem& sys);

struct LinearizationReport {
    bool ok = true;
    std::vector<Expr> identity_residuals;
    bool mapping_checked = false;
    bool mapping_ok = false;
    std::string mapping_method;
    std::string note;
};

LinearizationReport verify_linearization(const PdeSystem& sys, const LinearizationCandidate& cand);

} // namespace conslin
