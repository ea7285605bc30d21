// Acceptance gate: ten pinned criteria covering the codec, the positioning
// behaviour, the retrieval sweeps, and bitwise reproducibility. Each criterion
// prints exactly one PASS/FAIL line; the process exits nonzero if any fail.
// Tolerances and run counts are frozen here on purpose -- do not relax them to
// make a regression green.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bna/archive.hpp"
#include "bna/codec.hpp"
#include "bna/engine.hpp"
#include "bna/geometry.hpp"
#include "bna/rng.hpp"

namespace fs = std::filesystem;
using namespace bna;
using engine::SimConfig;

namespace {

std::string fmt(double v, int prec = 4) {
    std::ostringstream ss;
    ss << std::setprecision(prec) << v;
    return ss.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Average-rank Spearman correlation; zero variance on either side counts as
// "no trend" (0), which satisfies a <= 0 requirement.
std::vector<double> ranks_of(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = ranks_of(x);
    const auto ry = ranks_of(y);
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

int main() {
    int failures = 0;
    const auto t0 = std::chrono::steady_clock::now();
    auto report = [&](int k, bool pass, const std::string& detail) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << '[' << k << "] " << (pass ? "PASS" : "FAIL") << " - " << detail << " (t+"
                  << fmt(s, 4) << "s)" << std::endl;
        if (!pass) ++failures;
    };

    // [1] Codec round-trip: 1000 random payloads of 0..10240 bytes decode to
    // the original in both encodings, and goldman never emits two equal
    // adjacent bases within the payload.
    {
        Pcg32 rng(2208, 11);
        const int n_strings = 1000;
        bool ok = true;
        std::string why;
        std::uint64_t total_bytes = 0;
        for (int i = 0; i < n_strings && ok; ++i) {
            const std::size_t len = rng.next_u64() % (10 * 1024 + 1);
            std::vector<std::uint8_t> data(len);
            for (auto& b : data) b = static_cast<std::uint8_t>(rng.next_u64() & 0xFF);
            total_bytes += len;
            for (auto enc : {codec::Encoding::Basic, codec::Encoding::Goldman}) {
                const auto file = codec::EncodedFile::encode(data, enc, "rt", 200);
                if (file.decode() != data) {
                    ok = false;
                    why = "round-trip mismatch, " + std::string(codec::encoding_name(enc)) +
                          ", payload " + std::to_string(len) + " B (string " + std::to_string(i) +
                          ")";
                    break;
                }
                if (enc == codec::Encoding::Goldman) {
                    std::uint64_t seen = 0;
                    codec::Nucleotide prev{};
                    bool have_prev = false;
                    for (const auto& p : file.plasmids) {
                        for (std::size_t j = 0;
                             j < p.bases.size() && seen < file.payload_len_bases; ++j, ++seen) {
                            if (have_prev && p.bases[j] == prev) {
                                ok = false;
                                why = "goldman adjacent repeat at base " + std::to_string(seen) +
                                      " (string " + std::to_string(i) + ")";
                            }
                            prev = p.bases[j];
                            have_prev = true;
                        }
                    }
                }
            }
        }
        report(1, ok,
               ok ? std::to_string(n_strings) + " payloads (0..10240 B, " +
                        fmt(static_cast<double>(total_bytes) / 1048576.0, 3) +
                        " MiB total) round-tripped in both encodings; goldman repeat-free"
                  : why);
    }

    // [2] Information density: basic is exactly 4 bases/byte; a
    // uniform-histogram goldman table assigns every byte a 5- or 6-trit code.
    {
        Pcg32 rng(2208, 12);
        bool basic_ok = true;
        for (int i = 0; i < 200 && basic_ok; ++i) {
            const std::size_t len = rng.next_u64() % 4097;
            std::vector<std::uint8_t> data(len);
            for (auto& b : data) b = static_cast<std::uint8_t>(rng.next_u64() & 0xFF);
            basic_ok = codec::encode_basic(data).size() == 4 * data.size();
        }
        codec::ByteHistogram hist{};
        hist.fill(1);
        const auto table = codec::HuffmanTable::from_histogram(hist);
        std::size_t lo = 99, hi = 0;
        for (int b = 0; b < 256; ++b) {
            const std::size_t l = table.code_length(static_cast<std::uint8_t>(b));
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
        const bool goldman_ok = lo >= 5 && hi <= 6;
        report(2, basic_ok && goldman_ok,
               std::string("basic = 4 bases/byte on 200 random payloads") +
                   (basic_ok ? "" : " [VIOLATED]") + "; goldman uniform code lengths in [" +
                   std::to_string(lo) + "," + std::to_string(hi) + "] (need [5,6])");
    }

    // [3] Positioning accuracy: destination at the beacon barycentre, release
    // on the 0.300 cm circle, 100 bacteria, 1000 s, defaults. Mean final
    // error < 0.05 cm in at least 4 of 5 seeds.
    {
        int under = 0;
        std::string errs;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            SimConfig cfg;
            cfg.seed = seed;
            const auto layout = archive::default_layout(cfg.layout);
            const auto stats =
                engine::run_positioning(cfg, layout.point_b + Vec2{0.3, 0.0}, layout.point_b, 100);
            under += stats.mean_error_cm < 0.05 ? 1 : 0;
            errs += (errs.empty() ? "" : "/") + fmt(stats.mean_error_cm, 3);
        }
        report(3, under >= 4,
               "mean final error " + errs + " cm; " + std::to_string(under) +
                   "/5 seeds under 0.05 cm (need >=4)");
    }

    // [4] Hull ordering: destinations on circle A (0.030 cm) position better
    // than twice as well as circle D (0.200 cm), averaged over 5 seeds.
    {
        double mean_a = 0.0, mean_d = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            SimConfig cfg;
            cfg.seed = seed;
            mean_a +=
                engine::run_positioning(cfg, {0.3, 0.0}, {0.030, 0.0}, 100).mean_error_cm;
            mean_d +=
                engine::run_positioning(cfg, {0.3, 0.0}, {0.200, 0.0}, 100).mean_error_cm;
        }
        mean_a /= 5.0;
        mean_d /= 5.0;
        report(4, mean_d > 2.0 * mean_a,
               "circle D mean error " + fmt(mean_d, 3) + " cm vs circle A " + fmt(mean_a, 3) +
                   " cm (ratio " + fmt(mean_d / mean_a, 3) + ", need > 2)");
    }

    // [5] Favorable retrieval corner: D=5, 150 retrievers per cluster, basic
    // encoding, full replication. Full retrieval inside the time limit in at
    // least 8 of 10 seeds.
    {
        int complete = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SimConfig cfg;
            cfg.n_retrievers_per_cluster = 150;
            cfg.seed = seed;
            const auto rec = engine::run_retrieval(cfg);
            complete += rec.pct_retrieved == 1.0 ? 1 : 0;
        }
        report(5, complete >= 8,
               std::to_string(complete) + "/10 seeds reached 100% retrieval within 7200 s "
                                          "(need >=8)");
    }

    // [6]+[7] share one desk-grid campaign at 5 seeds per point.
    std::vector<engine::MetricsRecord> sweep;
    {
        engine::SweepGrid grid = engine::SweepGrid::desk_scale();
        grid.seeds = 5;
        SimConfig base;
        const auto specs = engine::plan_parameter_sweep(base, grid);
        sweep = engine::run_plan(specs, 1);
    }

    // [6] Encoding cost ordering: at every (N, D) grid point the goldman mean
    // completion time is >= the basic one (ties allowed).
    {
        std::map<std::tuple<int, double, codec::Encoding>, std::vector<double>> cell;
        for (const auto& r : sweep) {
            cell[{r.n_retrievers, r.D, r.encoding}].push_back(r.completion_time_s);
        }
        bool ok = true;
        double worst = 0.0;  // most negative goldman-minus-basic margin
        std::string worst_at;
        for (const auto& [key, times] : cell) {
            const auto [n, d, enc] = key;
            if (enc != codec::Encoding::Basic) continue;
            const double mb = mean_of(times);
            const double mg = mean_of(cell.at({n, d, codec::Encoding::Goldman}));
            const double margin = mg - mb;
            if (margin < worst) {
                worst = margin;
                worst_at = "N=" + std::to_string(n) + ",D=" + fmt(d, 3);
            }
            ok = ok && mg >= mb;
        }
        report(6, ok,
               ok ? "goldman mean completion >= basic at all 6 grid points (5 seeds each)"
                  : "goldman beat basic by " + fmt(-worst, 4) + " s at " + worst_at);
    }

    // [7] Sweep trends: completion time must not increase with retriever
    // count, and retrieval percentage must not increase with D.
    {
        std::map<int, std::vector<double>> by_n;
        std::map<double, std::vector<double>> by_d;
        for (const auto& r : sweep) {
            by_n[r.n_retrievers].push_back(r.completion_time_s);
            by_d[r.D].push_back(r.pct_retrieved);
        }
        std::vector<double> ns, n_means, ds, d_means;
        for (const auto& [n, v] : by_n) {
            ns.push_back(n);
            n_means.push_back(mean_of(v));
        }
        for (const auto& [d, v] : by_d) {
            ds.push_back(d);
            d_means.push_back(mean_of(v));
        }
        const double rho_n = spearman(ns, n_means);
        const double rho_d = spearman(ds, d_means);
        report(7, rho_n <= 0.0 && rho_d <= 0.0,
               "spearman(completion vs N) = " + fmt(rho_n, 3) +
                   ", spearman(pct vs D) = " + fmt(rho_d, 3) + " (both need <= 0)");
    }

    // [8] Content management: with two clusters relocated outside the beacon
    // hull, the in-hull clusters are retrieved at least as completely as the
    // out-of-hull ones (mean per-cluster fraction over 10 seeds).
    {
        double in_sum = 0.0, out_sum = 0.0;
        int in_n = 0, out_n = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SimConfig cfg;
            cfg.layout.mode = archive::LayoutMode::TwoOutside;
            cfg.n_retrievers_per_cluster = 150;
            cfg.seed = seed;
            const auto rec = engine::run_retrieval(cfg);
            const auto layout = archive::default_layout(cfg.layout);
            const auto& tri = layout.storage_triad;
            for (std::size_t c = 0; c < layout.clusters.size(); ++c) {
                const bool inside = point_strictly_inside_triangle(
                    layout.clusters[c].centre, tri.beacon(0).position, tri.beacon(1).position,
                    tri.beacon(2).position);
                (inside ? in_sum : out_sum) += rec.per_cluster_retrieved[c];
                (inside ? in_n : out_n) += 1;
            }
        }
        const double in_mean = in_sum / in_n;
        const double out_mean = out_sum / out_n;
        report(8, in_n > 0 && out_n > 0 && in_mean >= out_mean,
               "mean retrieval fraction in-hull " + fmt(in_mean, 4) + " vs out-of-hull " +
                   fmt(out_mean, 4) + " over 10 seeds (need in >= out)");
    }

    // [9] Conjugation success probability: 10^4 forced attempts against the
    // N(0,1) > 0.5 model, within 0.01 of erfc(0.5/sqrt(2))/2.
    {
        const double oracle = 0.308537538725987;
        Pcg32 rng(7321, 5);
        int hits = 0;
        for (int i = 0; i < 10000; ++i) {
            hits += engine::conjugation_success_trial(rng, engine::SuccessModel::NormalThreshold,
                                                      0.5)
                        ? 1
                        : 0;
        }
        const double rate = hits / 10000.0;
        report(9, std::abs(rate - oracle) <= 0.01,
               "observed rate " + fmt(rate, 5) + " vs " + fmt(oracle, 6) + " (tolerance 0.01)");
    }

    // [10] Bitwise reproducibility through the CLI: the positioning preset at
    // stock desk scale and the retrieval preset on a shortened horizon give
    // byte-identical CSVs when rerun and when parallelised.
    {
        const fs::path dir =
            fs::temp_directory_path() / ("bna_accept_" + std::to_string(static_cast<long>(::getpid())));
        fs::remove_all(dir);
        fs::create_directories(dir);
        auto sh = [&](const std::string& args) {
            const std::string cmd =
                std::string(BNARC_BIN) + " " + args + " >/dev/null 2>&1";
            return std::system(cmd.c_str()) == 0;
        };
        bool ran = true;
        ran = ran && sh("run --preset positioning --out " + (dir / "p1.csv").string());
        ran = ran && sh("run --preset positioning --out " + (dir / "p2.csv").string());
        ran = ran && sh("run --preset positioning --jobs 4 --out " + (dir / "p4.csv").string());
        const std::string short_run =
            "sim.time_limit_s=100 sim.conjugation_time_s=0 payload.bytes=40";
        ran = ran && sh("run --preset retrieval --out " + (dir / "r1.csv").string() + " " + short_run);
        ran = ran && sh("run --preset retrieval --out " + (dir / "r2.csv").string() + " " + short_run);
        ran = ran && sh("run --preset retrieval --jobs 4 --out " + (dir / "r4.csv").string() + " " +
                        short_run);
        const std::string p1 = slurp(dir / "p1.csv");
        const std::string r1 = slurp(dir / "r1.csv");
        const bool pos_ok = ran && !p1.empty() && p1 == slurp(dir / "p2.csv") &&
                            p1 == slurp(dir / "p4.csv");
        const bool ret_ok = ran && !r1.empty() && r1 == slurp(dir / "r2.csv") &&
                            r1 == slurp(dir / "r4.csv");
        fs::remove_all(dir);
        report(10, pos_ok && ret_ok,
               std::string(ran ? "" : "CLI invocation failed; ") + "positioning preset " +
                   (pos_ok ? "byte-identical" : "DIVERGED") +
                   ", retrieval preset " + (ret_ok ? "byte-identical" : "DIVERGED") +
                   " across rerun and --jobs 1/4");
    }

    std::cout << "acceptance: " << (10 - failures) << "/10 criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
