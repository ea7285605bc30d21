#include "bna/archive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bna::archive {

std::string_view layout_mode_name(LayoutMode m) {
    return m == LayoutMode::AllInside ? "all-inside" : "two-outside";
}

LayoutMode layout_mode_from_name(std::string_view name) {
    if (name == "all-inside") return LayoutMode::AllInside;
    if (name == "two-outside") return LayoutMode::TwoOutside;
    throw std::invalid_argument("unknown layout mode: " + std::string(name));
}

ArchiveLayout default_layout(const LayoutParams& params) {
    if (!(params.ab_distance > 0.0)) throw std::invalid_argument("ab_distance must be positive");
    if (!(params.cluster_radius > 0.0)) {
        throw std::invalid_argument("cluster_radius must be positive");
    }

    const Vec2 a{0.0, -params.ab_distance};
    const Vec2 b{0.0, 0.0};
    const Vec2 c{0.0, params.ab_distance};

    field::BeaconTriad storage =
        field::BeaconTriad::equilateral(b, params.triad_side, params.triad_orientation, 0);
    field::BeaconTriad destination =
        field::BeaconTriad::equilateral(c, params.triad_side, params.triad_orientation, 3);

    ArchiveLayout layout{params.mode, a, b, c, storage, destination, {}, params.namespace_radius};

    const double o = params.cluster_offset;
    Vec2 centres[4] = {{-o, -o}, {o, -o}, {-o, o}, {o, o}};
    if (params.mode == LayoutMode::TwoOutside) {
        // Push the far-side pair straight up onto the triad's top edge. The
        // two upper vertex ordinates can disagree by an ulp, so take the
        // higher one: the pinned points then sit on or above the edge for
        // either rounding outcome and the strict interior test excludes them.
        const double edge_y =
            std::max(storage.beacon(0).position.y, storage.beacon(1).position.y);
        centres[2].y = edge_y;
        centres[3].y = edge_y;
    }
    for (int i = 0; i < 4; ++i) {
        Cluster cl;
        cl.id = i;
        cl.centre = centres[i];
        cl.radius = params.cluster_radius;
        cl.priority = storage.contains_strict(cl.centre) ? Priority::High : Priority::Low;
        cl.max_concurrent = params.max_concurrent;
        layout.clusters.push_back(std::move(cl));
    }
    return layout;
}

void populate_clusters(ArchiveLayout& layout, int members_per_cluster, double capacity_mean,
                       double capacity_std, std::uint64_t seed) {
    if (members_per_cluster < 0) throw std::invalid_argument("member count must be non-negative");
    for (Cluster& cl : layout.clusters) {
        Pcg32 rng(seed, streams::kClusterBase + static_cast<std::uint64_t>(cl.id));
        cl.members.clear();
        cl.members.reserve(static_cast<std::size_t>(members_per_cluster));
        for (int i = 0; i < members_per_cluster; ++i) {
            StorageBacterium m;
            // Uniform over the disc: sqrt-radius against a uniform angle.
            const double r = cl.radius * std::sqrt(rng.uniform01());
            const double ang = 2.0 * std::numbers::pi * rng.uniform01();
            m.position = {cl.centre.x + r * std::cos(ang), cl.centre.y + r * std::sin(ang)};
            const double cap = std::round(rng.normal(capacity_mean, capacity_std));
            m.capacity = static_cast<std::uint32_t>(std::max(1.0, cap));
            cl.members.push_back(std::move(m));
        }
    }
}

Vec2 locate_namespace(const field::BeaconTriad& triad, const field::TargetConcentrations& ns) {
    // c_i = exp(-d_i^2)  =>  d_i^2 = -ln c_i. Subtracting the squared-distance
    // equations pairwise leaves a 2x2 linear system for (x, y).
    double r2[3];
    for (int i = 0; i < 3; ++i) {
        if (!(ns[i] > 0.0 && ns[i] <= 1.0)) {
            throw NamespaceUnresolved("namespace concentration out of (0, 1]");
        }
        r2[i] = -std::log(ns[i]);
    }
    const Vec2 p0 = triad.beacon(0).position;
    const Vec2 p1 = triad.beacon(1).position;
    const Vec2 p2 = triad.beacon(2).position;
    const double a11 = 2.0 * (p1.x - p0.x), a12 = 2.0 * (p1.y - p0.y);
    const double a21 = 2.0 * (p2.x - p0.x), a22 = 2.0 * (p2.y - p0.y);
    const double b1 = r2[0] - r2[1] + (p1.x * p1.x + p1.y * p1.y) - (p0.x * p0.x + p0.y * p0.y);
    const double b2 = r2[0] - r2[2] + (p2.x * p2.x + p2.y * p2.y) - (p0.x * p0.x + p0.y * p0.y);
    const double det = a11 * a22 - a12 * a21;
    return {(b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det};
}

StoreReport store(const field::TargetConcentrations& ns, const codec::EncodedFile& file,
                  ArchiveLayout& layout, int replication_k) {
    if (replication_k < 0) throw std::invalid_argument("replication_k must be non-negative");

    const Vec2 at = locate_namespace(layout.storage_triad, ns);
    std::vector<Cluster*> resolved;
    for (Cluster& cl : layout.clusters) {
        if (distance(cl.centre, at) <= layout.namespace_radius) resolved.push_back(&cl);
    }
    if (resolved.empty()) {
        throw NamespaceUnresolved("no cluster within reach of the namespace position");
    }

    StoreReport report;
    report.per_cluster_indices.resize(layout.clusters.size());

    // Round-robin split across the resolved clusters.
    const std::size_t n = resolved.size();
    std::vector<std::vector<std::uint32_t>> subsets(n);
    for (std::uint32_t i = 0; i < file.plasmids.size(); ++i) {
        subsets[i % n].push_back(i);
    }

    for (std::size_t ci = 0; ci < n; ++ci) {
        Cluster& cl = *resolved[ci];
        const std::vector<std::uint32_t>& subset = subsets[ci];
        report.per_cluster_indices[static_cast<std::size_t>(cl.id)] = subset;
        if (subset.empty()) continue;
        if (cl.members.empty()) {
            throw CapacityExceeded("cluster " + std::to_string(cl.id) +
                                   " has no storage bacteria for " +
                                   std::to_string(subset.size()) + " plasmids");
        }

        // Members take consecutive cyclic windows of the subset. Windows tile
        // the subset contiguously, so the first ceil(|subset|/capacity)
        // members already cover every plasmid; later members add replicas.
        const std::uint64_t full_budget =
            static_cast<std::uint64_t>(subset.size()) * cl.members.size();
        std::uint64_t budget = replication_k == 0
                                   ? full_budget
                                   : static_cast<std::uint64_t>(replication_k) * subset.size();
        std::size_t cursor = 0;
        std::uint64_t assigned = 0;
        for (StorageBacterium& m : cl.members) {
            const std::uint64_t want =
                std::min<std::uint64_t>({m.capacity, subset.size(), budget});
            m.held.clear();
            m.held.reserve(static_cast<std::size_t>(want));
            for (std::uint64_t k = 0; k < want; ++k) {
                m.held.push_back(subset[cursor]);
                cursor = (cursor + 1) % subset.size();
            }
            budget -= want;
            assigned += want;
            if (budget == 0) break;
        }
        if (assigned < subset.size()) {
            throw CapacityExceeded("cluster " + std::to_string(cl.id) + " can hold " +
                                   std::to_string(assigned) + " of " +
                                   std::to_string(subset.size()) + " plasmids");
        }
    }
    return report;
}

std::optional<std::size_t> checkout_conjugation(Cluster& cluster, Pcg32& rng) {
    if (cluster.concurrent >= cluster.max_concurrent) return std::nullopt;
    std::vector<std::size_t> free;
    free.reserve(cluster.members.size());
    for (std::size_t i = 0; i < cluster.members.size(); ++i) {
        if (!cluster.members[i].busy) free.push_back(i);
    }
    if (free.empty()) return std::nullopt;
    const std::size_t pick = free[rng.next_u64() % free.size()];
    cluster.members[pick].busy = true;
    ++cluster.concurrent;
    cluster.max_concurrent_observed = std::max(cluster.max_concurrent_observed, cluster.concurrent);
    return pick;
}

void release_conjugation(Cluster& cluster, std::size_t member_index) {
    if (member_index >= cluster.members.size() || !cluster.members[member_index].busy) {
        throw ArchiveError("release of a member that is not checked out");
    }
    cluster.members[member_index].busy = false;
    --cluster.concurrent;
}

std::vector<int> distribute_by_priority(std::span<const ChunkSpec> chunks,
                                        std::vector<ClusterBudget>& clusters) {
    std::vector<int> assignment;
    assignment.reserve(chunks.size());
    for (const ChunkSpec& chunk : chunks) {
        bool stored = false;
        for (ClusterBudget& cl : clusters) {
            if (cl.priority != chunk.priority) continue;
            if (cl.free_slots < chunk.size) continue;
            cl.free_slots -= chunk.size;
            assignment.push_back(cl.cluster_id);
            stored = true;
            break;
        }
        if (!stored) {
            throw NoMatchingCluster("chunk " + std::to_string(chunk.id) +
                                    " fits no cluster of its priority");
        }
    }
    return assignment;
}

}  // namespace bna::archive
