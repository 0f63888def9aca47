#pragma once

#include <Eigen/Dense>
#include <vector>

#include "seqdet/model.hpp"

namespace seqdet {

/// One step of the Kalman recursion run under the no-change model.
struct KalmanState {
    Eigen::VectorXd estimate;       // E(theta_n | F_n)
    Eigen::MatrixXd covariance;     // estimation error covariance
    Eigen::VectorXd innovation;     // xi_n = X_n - E(theta_n | F_{n-1})
    Eigen::MatrixXd innovation_cov; // Sigma_n
    Eigen::MatrixXd gain;           // K_n
};

/// Linear state-space hidden Markov model with additive change intensities
/// nu_theta (state) and nu_x (observation). The observation matrix is the
/// identity, so the state and observation dimensions coincide.
///
/// The LLR is evaluated on Kalman innovations; the post-change innovation
/// mean shift delta_n(k) depends on the change point, so there is no O(1)
/// recursion for the detection statistic.
class StateSpaceModel : public Model {
public:
    StateSpaceModel(Eigen::MatrixXd transition, Eigen::MatrixXd state_noise_cov,
                    Eigen::MatrixXd obs_noise_cov, Eigen::VectorXd nu_theta,
                    Eigen::VectorXd nu_x);

    std::size_t dim() const { return static_cast<std::size_t>(transition_.rows()); }
    const Eigen::MatrixXd& transition() const { return transition_; }
    const Eigen::VectorXd& nu_theta() const { return nu_theta_; }
    const Eigen::VectorXd& nu_x() const { return nu_x_; }
    const Eigen::MatrixXd& state_noise_sampler() const { return state_noise_sampler_; }
    const Eigen::MatrixXd& obs_noise_sampler() const { return obs_noise_sampler_; }

    /// Prediction/update for observation x_n; the filter starts from
    /// theta_0 = 0 with zero covariance.
    KalmanState kalman_step(const KalmanState& prev, const Eigen::VectorXd& x_n) const;
    KalmanState initial_filter_state() const;

    /// Innovation mean shift delta_i(k), i >= k, for the change signal
    /// propagated through the same filter. delta[j] is delta_{k+j}(k) when
    /// the filter started at time start_time = k (Sigma_i, K_i are
    /// time-dependent until the Riccati recursion converges).
    std::vector<Eigen::VectorXd> innovation_shift_profile(std::size_t k,
                                                          std::size_t n_max) const;

    LlrCapability capability() const override { return LlrCapability::ChangePointDependent; }
    /// q computed numerically as the limit of (1/2) delta_i(k)^T Sigma_i^{-1}
    /// delta_i(k) under the deterministic recursion.
    double drift() const override { return drift_; }
    std::unique_ptr<LlrPath> sample_path(std::size_t change_point, std::size_t n_max,
                                         std::uint64_t seed) const override;
    const char* name() const override { return "state_space"; }

    /// Sigma_n and K_n for n = 1..n_max (data independent).
    void riccati_pass(std::size_t n_max, std::vector<Eigen::MatrixXd>& sigma,
                      std::vector<Eigen::MatrixXd>& gain) const;

private:
    double compute_drift() const;

    Eigen::MatrixXd transition_;
    Eigen::MatrixXd state_noise_cov_;
    Eigen::MatrixXd obs_noise_cov_;
    Eigen::VectorXd nu_theta_;
    Eigen::VectorXd nu_x_;
    Eigen::MatrixXd state_noise_sampler_;  // K_W^{1/2}
    Eigen::MatrixXd obs_noise_sampler_;    // K_V^{1/2}
    double drift_ = 0.0;
};

}  // namespace seqdet
