#pragma once

#include "netid/rng.hpp"
#include "netid/types.hpp"

#include <optional>
#include <vector>

namespace netid {

// Reference input r(t), evaluable at any t >= 0.
struct ReferenceSignal {
    enum class Kind { SinusoidBank, Step, Table };

    Kind kind = Kind::Step;
    Vec amplitude;  // sinusoid bank: r_i = amplitude_i * sin(frequency_i * t)
    Vec frequency;
    Vec level;      // step: r_i = level_i for t >= 0
    std::vector<double> table_times;  // table: previous-sample hold
    std::vector<Vec> table_values;

    Vec eval(double t) const;
    void eval_into(double t, Vec& out) const;  // allocation-free hot path
    int channels() const;
    void validate() const;

    static ReferenceSignal zero(int n);
    static ReferenceSignal step(const Vec& level);
};

/// Per-channel sinusoids r_i(t) = amp_i sin(w_i t) with amp_i, w_i ~ U(1,2).
/// Rich enough to excite every mode of an n-channel reference model.
/// Draw order: per channel, amplitude then frequency.
ReferenceSignal pe_sinusoid_bank(int n, RngStream& rng);

/// Structured variant with unit amplitudes and frequencies i*w0 (i = 1..n);
/// over a window of length 2*pi/w0 the state Gramian is (pi/w0) * I.
ReferenceSignal pe_sinusoid_bank_structured(int n, double w0);

/// Degenerate bank with one shared (amplitude, frequency) pair on every
/// channel: all reference states coincide, so excitation is rank one.
ReferenceSignal synchronized_sinusoid(int n, RngStream& rng);

/// Reference network x_m' = A_m x_m + B r plus the error stabilizer L* and
/// its Lyapunov certificate (P, Q) for A_cl = A_m + B L*.
struct ReferenceModel {
    Mat a_m;
    Mat b;
    Mat l_star;
    Mat p;
    Mat q;
    ReferenceSignal r;

    Mat a_cl() const { return a_m + b * l_star; }
    int n() const { return static_cast<int>(a_m.rows()); }
    int inputs() const { return static_cast<int>(b.cols()); }
};

struct ReferenceDesign {
    std::optional<Mat> a_m;      // default -I
    std::optional<Mat> b;        // default I
    std::optional<Mat> l_star;   // explicit stabilizer; skips the construction
    std::optional<Mat> q;        // default 2I when A_cl == -I, else I
    double pole = -1.0;          // target closed-loop pole c (< 0)
    ReferenceSignal signal;
};

/// Build and certify a reference model. With square invertible B the
/// stabilizer is L* = B^-1 (c I - A_m), which places the closed loop at
/// c I; otherwise the caller must supply l_star explicitly. The result
/// always passes the Hurwitz check and the Lyapunov residual check.
ReferenceModel design_reference(int n, const ReferenceDesign& design);

enum class ExecPolicy { Serial, Parallel };

struct PeResult {
    bool satisfied = false;
    double min_eig_over_windows = 0.0;
    double window = 0.0;
    double alpha = 0.0;
    int windows_checked = 0;
};

/// Slide a window of length T over the sampled trajectory at stride T/10
/// (window starts aligned to the sample grid) and take the minimum over
/// windows of the Gramian's smallest eigenvalue. Satisfied iff that
/// minimum is >= alpha. The parallel policy splits windows across OpenMP
/// threads; per-window results are identical to the serial path.
PeResult check_pe(const std::vector<double>& times, const std::vector<Vec>& states,
                  double window, double alpha,
                  ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace netid
