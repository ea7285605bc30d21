#include "bna/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "bna/csv.hpp"

namespace bna::engine {

std::string_view success_model_name(SuccessModel m) {
    return m == SuccessModel::NormalThreshold ? "normal-threshold" : "coin";
}

SuccessModel success_model_from_name(std::string_view name) {
    if (name == "normal-threshold") return SuccessModel::NormalThreshold;
    if (name == "coin") return SuccessModel::Coin;
    throw std::invalid_argument("unknown success model: " + std::string(name));
}

void SimConfig::validate() const {
    try {
        motility.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid(e.what());
    }
    if (!(saturation_hysteresis >= 0.0 && saturation_hysteresis < 1.0)) {
        throw ConfigInvalid("saturation_hysteresis must lie in [0, 1)");
    }
    if (n_retrievers_per_cluster < 0) {
        throw ConfigInvalid("n_retrievers_per_cluster must be non-negative");
    }
    if (n_storage_per_cluster < 0) {
        throw ConfigInvalid("n_storage_per_cluster must be non-negative");
    }
    if (!(conjugation_time_s >= 0.0)) throw ConfigInvalid("conjugation_time_s must be >= 0");
    if (!(time_limit_s > 0.0)) throw ConfigInvalid("time_limit_s must be positive");
    if (!(time_limit_s >= conjugation_time_s)) {
        throw ConfigInvalid("time_limit_s must not be smaller than conjugation_time_s");
    }
    if (!(event_dt_s > 0.0)) throw ConfigInvalid("event_dt_s must be positive");
    const double ratio = event_dt_s / motility.dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * ratio) {
        throw ConfigInvalid("event_dt_s must be an integer multiple of motility.dt");
    }
    if (!(conjugation_threshold_cm > 0.0)) {
        throw ConfigInvalid("conjugation_threshold_cm must be positive");
    }
    if (!(delivery_radius_cm > 0.0)) throw ConfigInvalid("delivery_radius_cm must be positive");
    if (!std::isfinite(conjugation_success_threshold)) {
        throw ConfigInvalid("conjugation_success_threshold must be finite");
    }
    if (plasmid_len == 0) throw ConfigInvalid("plasmid_len must be positive");
    if (payload_bytes == 0) throw ConfigInvalid("payload_bytes must be positive");
    if (!(positioning.t_s >= 0.0)) throw ConfigInvalid("positioning.t_s must be >= 0");
    if (positioning.n_bacteria < 1) throw ConfigInvalid("positioning.n_bacteria must be >= 1");
    if (positioning.dest_points < 1 || positioning.start_points < 1) {
        throw ConfigInvalid("positioning point counts must be >= 1");
    }
    if (positioning.dest_radii.empty() || positioning.start_radii.empty()) {
        throw ConfigInvalid("positioning radii lists must be non-empty");
    }
    for (double r : positioning.dest_radii) {
        if (!(r > 0.0)) throw ConfigInvalid("positioning.dest_radii must be positive");
    }
    for (double r : positioning.start_radii) {
        if (!(r > 0.0)) throw ConfigInvalid("positioning.start_radii must be positive");
    }
    if (replication_k < 0) throw ConfigInvalid("replication_k must be non-negative");
}

std::vector<std::uint8_t> synthesize_payload(std::uint64_t bytes, std::uint64_t seed) {
    Pcg32 rng(seed, streams::kPayload);
    std::vector<std::uint8_t> out(bytes);
    for (std::uint64_t i = 0; i < bytes; ++i) {
        out[i] = static_cast<std::uint8_t>(rng.next() & 0xFF);
    }
    return out;
}

bool conjugation_success_trial(Pcg32& rng, SuccessModel model, double threshold) {
    if (model == SuccessModel::NormalThreshold) return rng.normal() > threshold;
    return rng.uniform01() < threshold;
}

namespace {

// Optional per-step dump; only single runs may enable it.
class TrajectoryWriter {
public:
    explicit TrajectoryWriter(const std::string& path) {
        if (path.empty()) return;
        out_.open(path, std::ios::trunc);
        if (!out_) throw ConfigInvalid("cannot open trajectory_path: " + path);
        out_ << "t,id,x,y,theta,mode\n";
    }

    bool enabled() const { return out_.is_open(); }

    void row(double t, const agent::BacteriumState& s) {
        out_ << csv::format(t) << ',' << s.id << ',' << csv::format(s.position.x) << ','
             << csv::format(s.position.y) << ',' << csv::format(s.heading) << ','
             << agent::mode_name(s.mode) << '\n';
    }

private:
    std::ofstream out_;
};

std::int64_t substeps_per_event(const SimConfig& cfg) {
    return std::llround(cfg.event_dt_s / cfg.motility.dt);
}

// Event ticks run at t = k*event_dt for k = 1..n, strictly below the time
// limit; a run that never completes reports completion_time_s == limit.
std::int64_t event_tick_count(const SimConfig& cfg) {
    const auto ticks =
        static_cast<std::int64_t>(std::ceil(cfg.time_limit_s / cfg.event_dt_s - 1e-9)) - 1;
    return std::max<std::int64_t>(ticks, 0);
}

}  // namespace

MetricsRecord run_retrieval(const SimConfig& cfg) {
    cfg.validate();

    const auto payload = synthesize_payload(cfg.payload_bytes, cfg.payload_seed);
    const auto file = codec::EncodedFile::encode(payload, cfg.encoding, "payload", cfg.plasmid_len);

    archive::ArchiveLayout layout = archive::default_layout(cfg.layout);
    const int storage_n =
        cfg.n_storage_per_cluster > 0 ? cfg.n_storage_per_cluster : cfg.n_retrievers_per_cluster;
    archive::populate_clusters(layout, storage_n, cfg.layout.capacity_mean, cfg.layout.capacity_std,
                               cfg.seed);
    const auto ns = field::targets_for(layout.storage_triad, layout.point_b);
    const archive::StoreReport report = store(ns, file, layout, cfg.replication_k);

    const std::size_t n_clusters = layout.clusters.size();
    const auto total = static_cast<std::uint32_t>(file.plasmids.size());
    std::vector<std::uint8_t> delivered(total, 0);
    std::uint32_t delivered_count = 0;
    std::vector<int> cluster_of(total, -1);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        for (std::uint32_t idx : report.per_cluster_indices[c]) {
            cluster_of[idx] = static_cast<int>(c);
        }
    }

    const agent::Stepper stepper(cfg.motility, cfg.saturation_hysteresis);
    const int per_cluster = cfg.n_retrievers_per_cluster;
    const std::size_t n_agents = n_clusters * static_cast<std::size_t>(per_cluster);

    std::vector<field::TargetConcentrations> cluster_targets(n_clusters);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        cluster_targets[c] = field::targets_for(layout.storage_triad, layout.clusters[c].centre);
    }
    const auto dest_targets = field::targets_for(layout.destination_triad, layout.point_c);

    std::vector<agent::BacteriumState> states(n_agents);
    std::vector<Pcg32> rngs;
    rngs.reserve(n_agents);
    std::vector<const field::BeaconTriad*> triad_of(n_agents, &layout.storage_triad);
    std::vector<std::int64_t> held_member(n_agents, -1);
    std::vector<int> held_cluster(n_agents, -1);
    std::vector<std::uint8_t> delivered_flag(n_agents, 0);

    for (std::size_t r = 0; r < n_agents; ++r) {
        rngs.emplace_back(cfg.seed, streams::kAgentBase + r);
        agent::BacteriumState& st = states[r];
        st.id = static_cast<std::uint32_t>(r);
        st.position = layout.point_a;
        st.heading = rngs.back().angle();
        st.targets = cluster_targets[r / per_cluster];
        st.should_conjugate = true;
        stepper.update_mode(st, layout.storage_triad);
    }

    std::vector<Pcg32> cluster_rngs;
    cluster_rngs.reserve(n_clusters);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        cluster_rngs.emplace_back(cfg.seed, streams::kClusterOps + c);
    }

    TrajectoryWriter traj(cfg.trajectory_path);

    MetricsRecord rec;
    rec.seed = cfg.seed;
    rec.encoding = cfg.encoding;
    rec.layout_mode = layout.mode;
    rec.n_retrievers = per_cluster;
    rec.n_storage = storage_n;
    rec.D = cfg.motility.D;

    const std::int64_t substeps = substeps_per_event(cfg);
    const std::int64_t ticks = event_tick_count(cfg);
    const double dt = cfg.motility.dt;

    bool complete = false;
    double completion_t = cfg.time_limit_s;

    auto finish_conjugation = [&](std::size_t r) {
        archive::release_conjugation(layout.clusters[static_cast<std::size_t>(held_cluster[r])],
                                     static_cast<std::size_t>(held_member[r]));
        held_cluster[r] = -1;
        held_member[r] = -1;
        // Fresh mode evaluation against the (already swapped) destination.
        states[r].mode = agent::Mode::Chemotaxis;
        stepper.update_mode(states[r], *triad_of[r]);
    };

    for (std::int64_t k = 1; k <= ticks && !complete; ++k) {
        // Movement phase: conjugating bacteria burn whole frozen spans at
        // once; everything else steps normally.
        for (std::size_t r = 0; r < n_agents; ++r) {
            agent::BacteriumState& st = states[r];
            std::int64_t remaining = substeps;
            while (remaining > 0) {
                if (st.mode == agent::Mode::Conjugating && !traj.enabled()) {
                    const std::int64_t take = std::min(st.conjugation_steps_left, remaining);
                    st.conjugation_steps_left -= take;
                    remaining -= take;
                    if (st.conjugation_steps_left == 0) finish_conjugation(r);
                    continue;
                }
                const bool was_conjugating = st.mode == agent::Mode::Conjugating;
                stepper.step(st, *triad_of[r], rngs[r]);
                if (was_conjugating && st.mode != agent::Mode::Conjugating) {
                    // step() recomputed the mode itself; redo it after the
                    // release so bookkeeping stays in one place.
                    finish_conjugation(r);
                }
                --remaining;
                if (traj.enabled()) {
                    const double t =
                        ((k - 1) * substeps + (substeps - remaining)) * dt;
                    traj.row(t, st);
                }
            }
        }

        // Event phase, ascending id for determinism.
        const double t_event = static_cast<double>(k) * cfg.event_dt_s;
        for (std::size_t r = 0; r < n_agents; ++r) {
            agent::BacteriumState& st = states[r];
            if (st.mode != agent::Mode::Conjugating && st.should_conjugate) {
                const auto c = r / static_cast<std::size_t>(per_cluster);
                archive::Cluster& cluster = layout.clusters[c];
                if (distance(st.position, cluster.centre) < cfg.conjugation_threshold_cm &&
                    conjugation_success_trial(rngs[r], cfg.success_model,
                                              cfg.conjugation_success_threshold)) {
                    if (auto member = archive::checkout_conjugation(cluster, cluster_rngs[c])) {
                        const archive::StorageBacterium& donor = cluster.members[*member];
                        st.cargo.clear();
                        st.cargo.reserve(donor.held.size());
                        for (std::uint32_t idx : donor.held) {
                            st.cargo.push_back(file.plasmids[idx]);
                        }
                        st.should_conjugate = false;
                        ++rec.per_cluster_conjugations[c];
                        triad_of[r] = &layout.destination_triad;
                        stepper.retarget(st, dest_targets, layout.destination_triad);
                        agent::begin_conjugation(st, cfg.conjugation_time_s, dt);
                        if (st.mode == agent::Mode::Conjugating) {
                            held_cluster[r] = static_cast<int>(c);
                            held_member[r] = static_cast<std::int64_t>(*member);
                        } else {
                            // Zero-length freeze: give the slot straight back.
                            archive::release_conjugation(cluster, *member);
                        }
                    }
                }
            }
            if (!delivered_flag[r] && !st.cargo.empty() && st.mode != agent::Mode::Conjugating &&
                distance(st.position, layout.point_c) < cfg.delivery_radius_cm) {
                for (const codec::Plasmid& p : st.cargo) {
                    if (!delivered[p.index]) {
                        delivered[p.index] = 1;
                        ++delivered_count;
                    }
                }
                delivered_flag[r] = true;
            }
        }

        if (delivered_count == total) {
            complete = true;
            completion_t = t_event;
        }
    }

    rec.completion_time_s = completion_t;
    rec.pct_retrieved = total == 0 ? 0.0 : static_cast<double>(delivered_count) / total;
    for (std::size_t c = 0; c < n_clusters && c < 4; ++c) {
        const auto& subset = report.per_cluster_indices[c];
        if (subset.empty()) {
            rec.per_cluster_retrieved[c] = 1.0;  // vacuously complete
            continue;
        }
        std::uint32_t got = 0;
        for (std::uint32_t idx : subset) got += delivered[idx];
        rec.per_cluster_retrieved[c] = static_cast<double>(got) / subset.size();
        rec.max_concurrent_observed =
            std::max(rec.max_concurrent_observed, layout.clusters[c].max_concurrent_observed);
    }
    return rec;
}

PositioningStats run_positioning(const SimConfig& cfg, Vec2 start, Vec2 destination,
                                 int n_bacteria) {
    cfg.validate();
    if (n_bacteria < 1) throw ConfigInvalid("positioning requires at least one bacterium");

    const archive::ArchiveLayout layout = archive::default_layout(cfg.layout);
    const field::BeaconTriad& triad = layout.storage_triad;
    const auto targets = field::targets_for(triad, destination);
    const agent::Stepper stepper(cfg.motility, cfg.saturation_hysteresis);
    const std::int64_t steps = std::llround(cfg.positioning.t_s / cfg.motility.dt);

    std::vector<agent::BacteriumState> states(static_cast<std::size_t>(n_bacteria));
    std::vector<Pcg32> rngs;
    rngs.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        rngs.emplace_back(cfg.seed, streams::kAgentBase + i);
        agent::BacteriumState& st = states[i];
        st.id = static_cast<std::uint32_t>(i);
        st.position = start;
        st.heading = rngs.back().angle();
        st.targets = targets;
        stepper.update_mode(st, triad);
    }

    TrajectoryWriter traj(cfg.trajectory_path);

    for (std::int64_t s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i < states.size(); ++i) {
            stepper.step(states[i], triad, rngs[i]);
            if (traj.enabled()) traj.row(static_cast<double>(s + 1) * cfg.motility.dt, states[i]);
        }
    }

    double sum = 0.0, sum2 = 0.0;
    for (const auto& st : states) {
        const double e = distance(st.position, destination);
        sum += e;
        sum2 += e * e;
    }
    const double n = static_cast<double>(states.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var)};
}

std::vector<RunSpec> plan_circle_sweep(const SimConfig& base) {
    base.validate();
    const archive::ArchiveLayout layout = archive::default_layout(base.layout);
    const Vec2 centre = layout.point_b;
    const PositioningConfig& p = base.positioning;

    std::vector<RunSpec> specs;
    specs.reserve(p.dest_radii.size() * p.dest_points * p.start_radii.size() * p.start_points);
    for (std::size_t dc = 0; dc < p.dest_radii.size(); ++dc) {
        for (int dp = 0; dp < p.dest_points; ++dp) {
            const double da = 2.0 * std::numbers::pi * dp / p.dest_points;
            const Vec2 dest{centre.x + p.dest_radii[dc] * std::cos(da),
                            centre.y + p.dest_radii[dc] * std::sin(da)};
            for (std::size_t sc = 0; sc < p.start_radii.size(); ++sc) {
                for (int sp = 0; sp < p.start_points; ++sp) {
                    const double sa = 2.0 * std::numbers::pi * sp / p.start_points;
                    RunSpec spec;
                    spec.kind = RunSpec::Kind::Positioning;
                    spec.config = base;
                    spec.dest = dest;
                    spec.start = {centre.x + p.start_radii[sc] * std::cos(sa),
                                  centre.y + p.start_radii[sc] * std::sin(sa)};
                    spec.dest_circle = static_cast<int>(dc);
                    spec.dest_point = dp;
                    spec.start_circle = static_cast<int>(sc);
                    spec.start_point = sp;
                    specs.push_back(std::move(spec));
                }
            }
        }
    }
    return specs;
}

SweepGrid SweepGrid::full() {
    SweepGrid g;
    for (int n = 10; n <= 150; n += 10) g.retrievers.push_back(n);
    for (int d = 5; d <= 14; ++d) g.noise.push_back(static_cast<double>(d));
    g.encodings = {codec::Encoding::Basic, codec::Encoding::Goldman};
    g.seeds = 10;
    return g;
}

SweepGrid SweepGrid::desk_scale() {
    SweepGrid g;
    g.retrievers = {50, 100, 150};
    g.noise = {5.0, 14.0};
    g.encodings = {codec::Encoding::Basic, codec::Encoding::Goldman};
    g.seeds = 3;
    return g;
}

std::vector<RunSpec> plan_parameter_sweep(const SimConfig& base, const SweepGrid& grid) {
    base.validate();
    if (grid.retrievers.empty() || grid.noise.empty() || grid.encodings.empty() ||
        grid.seeds < 1) {
        throw ConfigInvalid("sweep grid must have at least one point per axis");
    }
    std::vector<RunSpec> specs;
    specs.reserve(grid.retrievers.size() * grid.noise.size() * grid.encodings.size() *
                  static_cast<std::size_t>(grid.seeds));
    for (int n : grid.retrievers) {
        for (double d : grid.noise) {
            for (codec::Encoding enc : grid.encodings) {
                for (int rep = 0; rep < grid.seeds; ++rep) {
                    RunSpec spec;
                    spec.kind = RunSpec::Kind::Retrieval;
                    spec.config = base;
                    spec.config.n_retrievers_per_cluster = n;
                    spec.config.motility.D = d;
                    spec.config.encoding = enc;
                    spec.config.seed = base.seed + static_cast<std::uint64_t>(rep);
                    specs.push_back(std::move(spec));
                }
            }
        }
    }
    return specs;
}

MetricsRecord run_spec(const RunSpec& spec, std::uint64_t run_id) {
    MetricsRecord rec;
    if (spec.kind == RunSpec::Kind::Retrieval) {
        rec = run_retrieval(spec.config);
    } else {
        const PositioningStats stats = run_positioning(
            spec.config, spec.start, spec.dest, spec.config.positioning.n_bacteria);
        rec.seed = spec.config.seed;
        rec.layout_mode = spec.config.layout.mode;
        rec.D = spec.config.motility.D;
        rec.duration_s = spec.config.positioning.t_s;
        rec.mean_error_cm = stats.mean_error_cm;
        rec.std_error_cm = stats.std_error_cm;
        rec.n_bacteria = spec.config.positioning.n_bacteria;
        rec.dest_circle = spec.dest_circle;
        rec.dest_point = spec.dest_point;
        rec.start_circle = spec.start_circle;
        rec.start_point = spec.start_point;
        rec.dest = spec.dest;
        rec.start = spec.start;
    }
    rec.run_id = run_id;
    return rec;
}

std::vector<MetricsRecord> run_plan(const std::vector<RunSpec>& specs, int jobs) {
    for (const RunSpec& s : specs) {
        if (!s.config.trajectory_path.empty() && specs.size() > 1) {
            throw ConfigInvalid("trajectory_path requires a single-run plan");
        }
    }
    std::vector<MetricsRecord> results(specs.size());
    if (specs.empty()) return results;

    const int workers = std::clamp<int>(jobs, 1, static_cast<int>(specs.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < specs.size(); ++i) {
            results[i] = run_spec(specs[i], static_cast<std::uint64_t>(i));
        }
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= specs.size()) return;
                try {
                    results[i] = run_spec(specs[i], static_cast<std::uint64_t>(i));
                } catch (...) {
                    std::scoped_lock lk(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

void write_retrieval_csv(std::ostream& os, std::span<const MetricsRecord> records) {
    os << "run_id,seed,encoding,layout,n_retrievers_per_cluster,n_storage_per_cluster,D,"
          "completion_time_s,pct_retrieved,conj_c0,conj_c1,conj_c2,conj_c3,"
          "retr_c0,retr_c1,retr_c2,retr_c3,max_concurrent_observed\n";
    for (const MetricsRecord& r : records) {
        os << r.run_id << ',' << r.seed << ',' << codec::encoding_name(r.encoding) << ','
           << archive::layout_mode_name(r.layout_mode) << ',' << r.n_retrievers << ','
           << r.n_storage << ',' << csv::format(r.D) << ',' << csv::format(r.completion_time_s)
           << ',' << csv::format(r.pct_retrieved);
        for (std::uint32_t c : r.per_cluster_conjugations) os << ',' << c;
        for (double f : r.per_cluster_retrieved) os << ',' << csv::format(f);
        os << ',' << r.max_concurrent_observed << '\n';
    }
}

void write_positioning_csv(std::ostream& os, std::span<const MetricsRecord> records) {
    os << "run_id,seed,n_bacteria,D,t_s,start_circle,start_point,start_x,start_y,"
          "dest_circle,dest_point,dest_x,dest_y,mean_error_cm,std_error_cm\n";
    for (const MetricsRecord& r : records) {
        os << r.run_id << ',' << r.seed << ',' << r.n_bacteria << ',' << csv::format(r.D) << ','
           << csv::format(r.duration_s) << ',' << static_cast<char>('E' + r.start_circle) << ','
           << r.start_point << ',' << csv::format(r.start.x) << ',' << csv::format(r.start.y)
           << ',' << static_cast<char>('A' + r.dest_circle) << ',' << r.dest_point << ','
           << csv::format(r.dest.x) << ',' << csv::format(r.dest.y) << ','
           << csv::format(r.mean_error_cm) << ',' << csv::format(r.std_error_cm) << '\n';
    }
}

std::string summary_line(RunSpec::Kind kind, std::string_view preset,
                         std::span<const MetricsRecord> records) {
    std::string out(preset);
    out += ": " + std::to_string(records.size()) + " runs";
    if (records.empty()) return out;
    if (kind == RunSpec::Kind::Retrieval) {
        std::size_t complete = 0;
        double pct = 0.0;
        for (const MetricsRecord& r : records) {
            complete += r.pct_retrieved == 1.0 ? 1 : 0;
            pct += r.pct_retrieved;
        }
        out += ", " + std::to_string(complete) + " complete, mean pct " +
               csv::format(pct / static_cast<double>(records.size()));
    } else {
        double err = 0.0;
        for (const MetricsRecord& r : records) err += r.mean_error_cm;
        out += ", mean error " + csv::format(err / static_cast<double>(records.size())) + " cm";
    }
    return out;
}

}  // namespace bna::engine
