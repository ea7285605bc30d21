#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bna/agent.hpp"
#include "bna/archive.hpp"
#include "bna/codec.hpp"
#include "bna/geometry.hpp"

namespace bna::engine {

struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid of the localization experiment: destinations on circles around the
// storage-triad centre, release points on wider circles.
struct PositioningConfig {
    double t_s = 1000.0;
    int n_bacteria = 100;
    std::vector<double> dest_radii = {0.030, 0.058, 0.087, 0.200};  // cm
    std::vector<double> start_radii = {0.300, 0.350, 0.450};        // cm
    int dest_points = 8;   // per destination circle
    int start_points = 6;  // per start circle
};

enum class SuccessModel : std::uint8_t {
    // success <=> Normal(0,1) draw > threshold (the gate as specified)
    NormalThreshold = 0,
    // success <=> Uniform(0,1) draw < threshold (threshold read as probability)
    Coin = 1,
};

std::string_view success_model_name(SuccessModel m);
SuccessModel success_model_from_name(std::string_view name);

struct SimConfig {
    agent::MotilityParams motility{};
    // Relative margin a raw concentration must drop below its target before a
    // saturated bacterium resumes chemotaxis.
    double saturation_hysteresis = 0.02;
    archive::LayoutParams layout{};

    int n_retrievers_per_cluster = 100;
    int n_storage_per_cluster = 0;  // 0 -> equal to retrievers (ratio 1)

    double conjugation_time_s = 1500.0;
    double time_limit_s = 7200.0;
    double event_dt_s = 50.0;
    double conjugation_threshold_cm = 0.005;
    double conjugation_success_threshold = 0.5;
    SuccessModel success_model = SuccessModel::NormalThreshold;
    double delivery_radius_cm = 0.01;

    codec::Encoding encoding = codec::Encoding::Basic;
    std::uint64_t seed = 1;
    int replication_k = 0;  // 0 -> maximal replication
    std::size_t plasmid_len = 200;

    // The stored file: pseudo-random bytes from payload_seed, independent of
    // the run seed so every run archives the same document.
    std::uint64_t payload_bytes = 18400;
    std::uint64_t payload_seed = 42;

    PositioningConfig positioning{};

    // When non-empty, single runs append per-step rows
    // (t,id,x,y,theta,mode) to this CSV path. Rejected for multi-run plans.
    std::string trajectory_path;

    void validate() const;  // throws ConfigInvalid
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One output row. Retrieval runs and positioning runs populate different
// subsets; unused numeric fields stay NaN / -1.
struct MetricsRecord {
    std::uint64_t run_id = 0;
    std::uint64_t seed = 0;
    codec::Encoding encoding = codec::Encoding::Basic;
    archive::LayoutMode layout_mode = archive::LayoutMode::AllInside;

    // retrieval
    int n_retrievers = 0;  // per cluster
    int n_storage = 0;     // per cluster
    double D = kNaN;
    double completion_time_s = kNaN;
    double pct_retrieved = kNaN;
    std::array<std::uint32_t, 4> per_cluster_conjugations{};
    std::array<double, 4> per_cluster_retrieved{};
    int max_concurrent_observed = 0;

    // positioning
    double duration_s = kNaN;
    double mean_error_cm = kNaN;
    double std_error_cm = kNaN;
    int n_bacteria = 0;
    int dest_circle = -1;
    int dest_point = -1;
    int start_circle = -1;
    int start_point = -1;
    Vec2 dest{};
    Vec2 start{};
};

// The file every simulation archives.
std::vector<std::uint8_t> synthesize_payload(std::uint64_t bytes, std::uint64_t seed);

// One conjugation attempt gate; consumes draws from `rng`.
bool conjugation_success_trial(Pcg32& rng, SuccessModel model, double threshold);

// Full retrieval simulation (storage, swimming, conjugation, delivery).
MetricsRecord run_retrieval(const SimConfig& cfg);

struct PositioningStats {
    double mean_error_cm = 0.0;
    double std_error_cm = 0.0;  // population standard deviation
};

// Releases n bacteria at `start` addressing `destination` and reports the
// final-distance statistics after positioning.t_s seconds.
PositioningStats run_positioning(const SimConfig& cfg, Vec2 start, Vec2 destination,
                                 int n_bacteria);

// ---------------------------------------------------------------------------
// Experiment plans

struct RunSpec {
    enum class Kind : std::uint8_t { Retrieval = 0, Positioning = 1 };
    Kind kind = Kind::Retrieval;
    SimConfig config;
    // positioning only
    Vec2 start{};
    Vec2 dest{};
    int dest_circle = -1;
    int dest_point = -1;
    int start_circle = -1;
    int start_point = -1;
};

// Every (destination point) x (start point) pair of the localization grid;
// defaults give (4*8) x (3*6) = 576 runs, all under the same seed.
std::vector<RunSpec> plan_circle_sweep(const SimConfig& base);

struct SweepGrid {
    std::vector<int> retrievers;
    std::vector<double> noise;  // rotational diffusion D values
    std::vector<codec::Encoding> encodings;
    int seeds = 10;

    static SweepGrid full();        // 15 x 10 x 2, 10 seeds = 3000 runs
    static SweepGrid desk_scale();  // 3 x 2 x 2, 3 seeds = 36 runs
};

// Retrieval runs over the cartesian grid; seed of repetition r is base+r.
std::vector<RunSpec> plan_parameter_sweep(const SimConfig& base, const SweepGrid& grid);

MetricsRecord run_spec(const RunSpec& spec, std::uint64_t run_id);

// Executes a plan with `jobs` worker threads. Results are ordered by plan
// index regardless of scheduling, so output bytes do not depend on jobs.
std::vector<MetricsRecord> run_plan(const std::vector<RunSpec>& specs, int jobs);

// ---------------------------------------------------------------------------
// Output

void write_retrieval_csv(std::ostream& os, std::span<const MetricsRecord> records);
void write_positioning_csv(std::ostream& os, std::span<const MetricsRecord> records);

std::string summary_line(RunSpec::Kind kind, std::string_view preset,
                         std::span<const MetricsRecord> records);

}  // namespace bna::engine
