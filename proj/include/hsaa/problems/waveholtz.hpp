// WaveHoltz fixed-point maps: filtered wave-equation evolution over one
// Helmholtz period, discretized by leapfrog in time and the face-averaged
// second-order stencil in space, with homogeneous Dirichlet walls.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "hsaa/fixed_point.hpp"

namespace hsaa {

/// Leapfrog stepper for w_tt = d/dx(c^2 dw/dx) - forcing on the interior of
/// an equispaced grid; walls are pinned to zero.
class WaveStepper1D {
public:
    /// speed holds c at every node including the walls (length n + 2).
    WaveStepper1D(Eigen::VectorXd speed, double h, double dt);

    Eigen::Index interior() const { return n_; }
    double dt() const { return dt_; }

    /// Lw on the interior (the variable-coefficient Laplacian).
    Eigen::VectorXd apply_operator(const Eigen::VectorXd& w) const;

    /// Second-order start: w^{-1} = u + (dt^2/2)(Lu - forcing).
    Eigen::VectorXd taylor_start(const Eigen::VectorXd& u, const Eigen::VectorXd& forcing) const;

    /// wnext = 2 wcur - wprev + dt^2 (L wcur - forcing_weight * forcing).
    Eigen::VectorXd step(const Eigen::VectorXd& wprev, const Eigen::VectorXd& wcur,
                         const Eigen::VectorXd& forcing, double forcing_weight) const;

    /// Staggered discrete energy, exactly conserved by the force-free scheme.
    double energy(const Eigen::VectorXd& wnew, const Eigen::VectorXd& wold) const;

private:
    Eigen::Index n_;
    double h_;
    double dt_;
    Eigen::VectorXd kappa_;  // c^2 at nodes 0..n+1
};

enum class WaveSpeed1D { Uniform, GaussianDip, Inclusion };  // c_a, c_b, c_c

double wave_speed_1d(WaveSpeed1D profile, double x);

class WaveHoltzProblem1D final : public FixedPointProblem<double> {
public:
    /// n interior points, h = 1/(n+1); the point source sits at the given
    /// interior gridpoint (1-based). Its amplitude is calibrated once by a
    /// direct Helmholtz solve so the solution magnitude hits `target_amplitude`.
    WaveHoltzProblem1D(Eigen::Index n = 513, double omega = 25.0 * M_SQRT2,
                       WaveSpeed1D speed = WaveSpeed1D::Uniform, double cfl = 0.5,
                       Eigen::Index source_gridpoint = 128, double target_amplitude = 2.0);

    Eigen::Index dim() const override { return n_; }
    double spacing() const override { return h_; }
    Eigen::VectorXd apply_G(const Eigen::VectorXd& u) const override;
    bool is_linear() const override { return true; }

    /// Fixed point by dense elimination on (I - A); assembled lazily, cached.
    /// Returns nullopt when the reference solve is disabled.
    std::optional<Eigen::VectorXd> exact_solution() const override;

    /// The dense reference costs n map applications; callers that only need
    /// residual histories can switch it off.
    void set_reference_enabled(bool enabled) { reference_enabled_ = enabled; }

    double omega() const { return omega_; }
    int steps_per_period() const { return nt_; }
    const WaveStepper1D& stepper() const { return stepper_; }
    const Eigen::VectorXd& forcing() const { return forcing_; }

private:
    Eigen::Index n_;
    double h_;
    double omega_;
    double period_;
    int nt_;
    WaveStepper1D stepper_;
    Eigen::VectorXd forcing_;
    bool reference_enabled_ = true;
    mutable std::optional<Eigen::VectorXd> cached_solution_;
};

/// 2D stepper on an N x N node grid including walls; unknowns are the
/// (N-2)^2 interior values in lexicographic order (x fastest).
class WaveStepper2D {
public:
    WaveStepper2D(Eigen::MatrixXd kappa_nodes, double h, double dt);  // kappa = c^2

    Eigen::Index interior() const { return nx_ * nx_; }
    double dt() const { return dt_; }
    Eigen::VectorXd apply_operator(const Eigen::VectorXd& w) const;
    Eigen::VectorXd taylor_start(const Eigen::VectorXd& u, const Eigen::VectorXd& forcing) const;
    Eigen::VectorXd step(const Eigen::VectorXd& wprev, const Eigen::VectorXd& wcur,
                         const Eigen::VectorXd& forcing, double forcing_weight) const;

private:
    Eigen::Index nx_;  // interior nodes per side
    double h_;
    double dt_;
    Eigen::MatrixXd kappa_;
};

class WaveHoltzProblem2D final : public FixedPointProblem<double> {
public:
    /// nodes x nodes grid on [0,1]^2 including walls, h = 1/(nodes-1).
    /// c^2 = 0.3 inside the cross 0.4 <= x <= 0.6 or 0.4 <= y <= 0.6, else 1.
    /// The point source sits at the interior node nearest (0.25, 0.75).
    WaveHoltzProblem2D(Eigen::Index nodes = 65, double omega = 11.0, double cfl = 0.5,
                       double target_amplitude = 1.0);

    Eigen::Index dim() const override { return n_; }
    double spacing() const override { return h_; }
    Eigen::VectorXd apply_G(const Eigen::VectorXd& u) const override;
    bool is_linear() const override { return true; }

    double omega() const { return omega_; }
    int steps_per_period() const { return nt_; }

    static double squared_speed(double x, double y);

private:
    Eigen::Index nodes_;
    Eigen::Index nx_;  // interior per side
    Eigen::Index n_;   // nx_^2
    double h_;
    double omega_;
    double period_;
    int nt_;
    WaveStepper2D stepper_;
    Eigen::VectorXd forcing_;
};

}  // namespace hsaa
