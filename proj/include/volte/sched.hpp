#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "volte/bip.hpp"
#include "volte/channel.hpp"

namespace volte {

inline constexpr int kFrameTtis = 20;

/// User ids follow the bits-matrix columns: VoLTE users 0..U-1, data users U..U+K-1.
struct TtiAllocation {
    std::vector<int> owner;                // per PRB: user id, or -1 when left unused
    std::vector<int> y;                    // per VoLTE user: 1 if served in this TTI
    std::vector<std::int64_t> data_bits;   // per data user
    std::vector<int> volte_served;

    static TtiAllocation empty(int num_prb, int num_volte, int num_data);

    int x(int prb, int user) const { return owner[prb] == user ? 1 : 0; }
    std::int64_t total_data_bits() const;
    /// Bits carried to one user on its PRBs.
    std::int64_t bits_to(const BitsMatrix& bits, int user) const;
};

struct FrameAllocation {
    std::vector<TtiAllocation> per_tti;
    std::vector<std::int64_t> user_bits;   // frame totals per user id (air-interface bits)
};

struct SchedulerState {
    int num_volte = 0;
    int num_data = 0;
    std::vector<char> remaining_volte;     // per VoLTE user: still waiting this frame
    std::int64_t c_volte = 0;
    std::int64_t c_data = 0;
    std::vector<double> pf_avg;            // A_k, strictly positive
    double gamma = 0.9;
    std::vector<std::int64_t> last_rates;  // C_{k,t} of the most recent TTI

    /// Fresh frame: every VoLTE user pending, accumulators zero, A_k as given (or 1).
    static SchedulerState start_frame(int num_volte, int num_data, double gamma,
                                      std::span<const double> pf_averages = {});

    std::vector<int> remaining_list() const;
    /// Applies one TTI's outcome: removes served users, accumulates bits, smooths A_k.
    void finish_tti(const TtiAllocation& alloc);
};

/// Indexing of the frame-level program X[n][u][t], Y[u][t].
struct FrameProgram {
    bip::BinaryProgram program;
    int num_prb = 0;
    int num_volte = 0;
    int num_data = 0;
    int num_tti = 0;

    int x_index(int prb, int user, int tti) const;
    int y_index(int volte_user, int tti) const;
};

/// Frame-level program exactly as stated: X for every (PRB, user, TTI), Y for every
/// (VoLTE user, TTI). With no data users the PRB rows become <= 1.
FrameProgram build_frame_program(const BitsMatrix& bits, int num_volte, int num_data,
                                 int num_tti = kFrameTtis);

/// Variables schedule_frame_optimal hands to the solver, summed over its programs
/// (upper bound; zero bits prune a few more).
std::int64_t frame_solver_variables(int num_prb, int num_volte, int num_data,
                                    int num_tti = kFrameTtis);
/// Largest per-TTI program size for the two-phase optimum.
std::int64_t tti_solver_variables(int num_prb, int num_volte, int num_data);

struct FrameOutcome {
    bip::SolveStatus status = bip::SolveStatus::infeasible;
    std::optional<FrameAllocation> allocation;  // optimal, or timeout with an incumbent
    double objective = 0.0;                     // data bits over the frame
    double bound = 0.0;
    std::int64_t nodes = 0;
};

/// Solves the frame-level program under block fading. With U <= T it splits exactly
/// into one packet-cover program per VoLTE user (each user alone in its own TTI);
/// otherwise the solver sees an equivalent reduced program (dominated data users
/// dropped, TTI relabelling symmetry removed).
FrameOutcome schedule_frame_optimal(const BitsMatrix& bits, int num_volte, int num_data,
                                    int num_tti, const bip::SolveLimits& limits);

/// LP bound of the frame-level program; nullopt when even the relaxation is infeasible.
std::optional<double> schedule_frame_relaxed_bound(const BitsMatrix& bits, int num_volte,
                                                   int num_data, int num_tti = kFrameTtis);

struct VolteSelection {
    std::vector<int> y;   // per VoLTE user (all U of them)
    std::vector<int> owner;  // per PRB: the covering VoLTE user or -1; a warm start only
    bip::SolveStatus status = bip::SolveStatus::optimal;
    std::int64_t nodes = 0;
};

/// Phase 1: most VoLTE users from `remaining` that fit in this TTI. Only Y decides
/// the outcome; `owner` merely seeds phase 2 with a feasible point.
VolteSelection tti_select_volte(const BitsMatrix& bits, std::span<const int> remaining,
                                int num_data, const bip::SolveLimits& limits);

/// Thrown when phase 2 cannot honour a phase-1 selection.
class PhaseContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Phase 2: maximize sum_k w_k * bits to data user k with the selected VoLTE users
/// each receiving at least one packet. Unit weights give the throughput objective.
/// `warm_owner` (per PRB, VoLTE user or -1) optionally seeds the search.
TtiAllocation tti_allocate(const BitsMatrix& bits, std::span<const int> y,
                           std::span<const double> weights,
                           const bip::SolveLimits& limits,
                           bip::SolveStatus* status = nullptr,
                           std::span<const int> warm_owner = {});

enum class HeuristicMode { max_throughput, pf, baseline };

struct HeuristicOptions {
    /// Literal pseudocode: the bundle loop runs while bits <= 300 and a bundle ending
    /// on the last PRB is rejected.
    bool strict_pseudocode = false;
};

/// Greedy single pass over PRBs. `ops`, when given, accumulates the number of
/// candidate evaluations (argmax comparisons plus bundle-extension steps).
TtiAllocation heuristic_tti(const BitsMatrix& bits, const SchedulerState& state,
                            HeuristicMode mode, HeuristicOptions options = {},
                            std::int64_t* ops = nullptr);

enum class Policy { frame_optimal, tti_optimal, tti_optimal_pf, heuristic, heuristic_pf, baseline };

std::string_view to_string(Policy policy);
std::optional<Policy> parse_policy(std::string_view name);

struct FrameOptions {
    double gamma = 0.9;
    bool strict_pseudocode = false;
    std::chrono::duration<double> time_limit{60.0};  // per solver call
    std::int64_t node_limit = 0;                       // per solver call, 0 = none
};

struct FrameRun {
    FrameAllocation allocation;
    SchedulerState state;
    bool infeasible = false;       // frame_optimal only
    int solver_timeouts = 0;
    std::int64_t heuristic_ops = 0;
};

/// Schedules one frame. `bits` holds one matrix (held for the whole frame) or one per
/// TTI; frame_optimal requires the former.
FrameRun run_frame(std::span<const BitsMatrix> bits, int num_volte, int num_data,
                   Policy policy, std::span<const double> pf_averages_in,
                   const FrameOptions& options = {});

/// tti,prb,user,bits for every allocated PRB.
void write_frame_csv(std::ostream& out, const FrameAllocation& frame,
                     std::span<const BitsMatrix> bits);

}  // namespace volte
