#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bna/codec.hpp"
#include "bna/field.hpp"
#include "bna/geometry.hpp"
#include "bna/rng.hpp"

namespace bna::archive {

enum class Priority : std::uint8_t { High = 0, Low = 1 };

enum class LayoutMode : std::uint8_t { AllInside = 0, TwoOutside = 1 };

std::string_view layout_mode_name(LayoutMode m);
LayoutMode layout_mode_from_name(std::string_view name);  // throws std::invalid_argument

struct ArchiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Some plasmid could not be placed in any storage bacterium.
struct CapacityExceeded : ArchiveError {
    using ArchiveError::ArchiveError;
};

// distribute_by_priority found a chunk with no eligible, non-full cluster.
struct NoMatchingCluster : ArchiveError {
    using ArchiveError::ArchiveError;
};

// A namespace resolved to no stored cluster.
struct NamespaceUnresolved : ArchiveError {
    using ArchiveError::ArchiveError;
};

// A motility-restricted carrier. `held` indexes into the stored file's
// plasmid list (indices, not copies, so replication does not multiply the
// sequence data).
struct StorageBacterium {
    Vec2 position{};
    std::uint32_t capacity = 0;
    std::vector<std::uint32_t> held;
    bool busy = false;
};

struct Cluster {
    int id = 0;
    Vec2 centre{};
    double radius = 0.0;
    Priority priority = Priority::High;
    std::vector<StorageBacterium> members;
    int max_concurrent = 50;
    int concurrent = 0;
    int max_concurrent_observed = 0;
};

struct LayoutParams {
    LayoutMode mode = LayoutMode::AllInside;
    double ab_distance = 0.4;      // cm, injection point -> storage centre (= storage -> dest)
    double cluster_offset = 0.02;  // cm, half-side of the cluster square
    double cluster_radius = 0.005; // cm
    double triad_side = 0.2425;    // cm
    // Vertex 0 at 30deg puts the triangle's flat edge on the far side from
    // the injection point, matching the storage-area drawing.
    double triad_orientation = 0.5235987755982988;  // pi/6 rad
    int max_concurrent = 50;
    double capacity_mean = 100.0;
    double capacity_std = 10.0;
    // Clusters whose centre lies within this distance of a namespace's
    // trilaterated position are addressed by a store().
    double namespace_radius = 0.1;  // cm
};

struct ArchiveLayout {
    LayoutMode mode = LayoutMode::AllInside;
    Vec2 point_a{};  // injection
    Vec2 point_b{};  // storage-area centre
    Vec2 point_c{};  // delivery
    field::BeaconTriad storage_triad;
    field::BeaconTriad destination_triad;
    std::vector<Cluster> clusters;
    double namespace_radius = 0.1;  // cm, see LayoutParams
};

// The canonical bench geometry: A, B, C collinear on the y axis spaced by
// ab_distance; equilateral beacon triads around B (attractants 0-2) and C
// (attractants 3-5); four clusters on the corners of a square around B. In
// TwoOutside mode the two far-side clusters are pushed straight up onto the
// triad edge, which the strict interior test classifies as outside.
ArchiveLayout default_layout(const LayoutParams& params = {});

// Fills every cluster with `members_per_cluster` bacteria: positions uniform
// in the cluster disc, capacities round(Normal(mean, std)) clamped to >= 1.
// Each cluster draws from its own stream of `seed`.
void populate_clusters(ArchiveLayout& layout, int members_per_cluster, double capacity_mean,
                       double capacity_std, std::uint64_t seed);

struct StoreReport {
    // Plasmid indices assigned to each cluster, in round-robin order.
    std::vector<std::vector<std::uint32_t>> per_cluster_indices;
};

// Stores a file at the location addressed by `ns`: plasmids are split
// round-robin across the resolved clusters, and within each cluster members
// hold consecutive cyclic windows of the cluster's subset so that every
// plasmid lands in at least one bacterium (CapacityExceeded otherwise).
// replication_k == 0 replicates maximally (every member filled to capacity);
// k >= 1 stops once each plasmid is held about k times.
StoreReport store(const field::TargetConcentrations& ns, const codec::EncodedFile& file,
                  ArchiveLayout& layout, int replication_k = 0);

// Closed-form trilateration of a namespace back to its position.
Vec2 locate_namespace(const field::BeaconTriad& triad, const field::TargetConcentrations& ns);

// Picks a uniformly random non-busy member and marks it busy, honouring the
// cluster-wide concurrency cap. nullopt when the cap is reached or no member
// is free.
std::optional<std::size_t> checkout_conjugation(Cluster& cluster, Pcg32& rng);
void release_conjugation(Cluster& cluster, std::size_t member_index);

// Priority-ordered first-fit placement of data chunks onto clusters.
struct ChunkSpec {
    std::uint32_t id = 0;
    std::uint64_t size = 0;  // plasmid slots
    Priority priority = Priority::High;
};

struct ClusterBudget {
    int cluster_id = 0;
    Priority priority = Priority::High;
    std::uint64_t free_slots = 0;
};

// Assigns each chunk (in id order) to the first cluster of matching priority
// with enough free slots; throws NoMatchingCluster when a chunk fits nowhere.
// Returns the chosen cluster_id per chunk.
std::vector<int> distribute_by_priority(std::span<const ChunkSpec> chunks,
                                        std::vector<ClusterBudget>& clusters);

}  // namespace bna::archive
