#ifndef PUBSUB_GOSSIP_H
#define PUBSUB_GOSSIP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PgStatus {
  PG_STATUS_OK = 0,
  PG_STATUS_NULL_POINTER = 1,
  PG_STATUS_INVALID_ARGUMENT = 2,
  PG_STATUS_INFEASIBLE_SEQUENCE = 3,
  PG_STATUS_NO_THRESHOLD = 4,
  PG_STATUS_TOO_LARGE = 5,
  PG_STATUS_BUFFER_TOO_SMALL = 6,
  PG_STATUS_INTERNAL = 7,
} PgStatus;

// Opaque degree distribution.
typedef struct PgDistribution PgDistribution;

// Opaque overlay graph.
typedef struct PgGraph PgGraph;

// Opaque overlay with subscriptions and neighbour caches.
typedef struct PgNetwork PgNetwork;

typedef struct PgMoments {
  double mean_degree;
  double second_moment;
  double mean_excess;
} PgMoments;

// Means are `INFINITY` when `divergent` is set.
typedef struct PgPrediction {
  double gamma_eff;
  double mean_receivers;
  double mean_subscribers;
  double branching_factor;
  bool divergent;
} PgPrediction;

typedef struct PgDissemination {
  size_t receivers;
  size_t subscribers_reached;
  uint64_t messages_sent;
  uint32_t max_hops;
} PgDissemination;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static, NUL-terminated description of a status code.
const char *pg_status_message(enum PgStatus status);

// Truncated Poisson distribution.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PgStatus pg_distribution_poisson(double mean, struct PgDistribution **out);

// Power law `p_k ∝ k^exponent` on `k_min..=k_max`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PgStatus pg_distribution_power_law(double exponent,
                                        size_t k_min,
                                        size_t k_max,
                                        struct PgDistribution **out);

// Degree histogram of the `(a, b)` fixed-size power-law construction.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum PgStatus pg_distribution_aiello(double a, double b, struct PgDistribution **out);

// `pmf[k]` is the probability of degree `k`.
//
// # Safety
// `pmf` must point to `len` readable doubles; `out` as above.
enum PgStatus pg_distribution_empirical(const double *pmf, size_t len, struct PgDistribution **out);

// # Safety
// `dist` must be null or a handle from a `pg_distribution_*` constructor
// that has not been freed.
void pg_distribution_free(struct PgDistribution *dist);

// # Safety
// `dist` must be a live handle and `out` writable.
enum PgStatus pg_distribution_moments(const struct PgDistribution *dist, struct PgMoments *out);

// Mean receivers and subscribers of one event.
//
// # Safety
// `dist` must be a live handle and `out` writable.
enum PgStatus pg_predict(const struct PgDistribution *dist,
                         double sigma,
                         double gamma,
                         struct PgPrediction *out);

// Critical effective gossip probability.
//
// # Safety
// `dist` must be a live handle and `out` writable.
enum PgStatus pg_threshold(const struct PgDistribution *dist, double *out);

// Samples `n` degrees from `dist` and wires them with the erased
// configuration model. The same `seed` always yields the same graph.
//
// # Safety
// `dist` must be a live handle and `out` writable.
enum PgStatus pg_graph_generate(const struct PgDistribution *dist,
                                size_t n,
                                uint64_t seed,
                                struct PgGraph **out);

// Graph from `edge_count` pairs laid out as `[u0, v0, u1, v1, ...]`.
//
// # Safety
// `edges` must point to `2 * edge_count` readable values (or may be null
// when `edge_count` is zero); `out` writable.
enum PgStatus pg_graph_from_edges(size_t n,
                                  const uint32_t *edges,
                                  size_t edge_count,
                                  struct PgGraph **out);

// # Safety
// `graph` must be null or a live handle.
void pg_graph_free(struct PgGraph *graph);

// Zero for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t pg_graph_node_count(const struct PgGraph *graph);

// Zero for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t pg_graph_edge_count(const struct PgGraph *graph);

// Size of the largest connected component.
//
// # Safety
// `graph` must be null or a live handle.
size_t pg_graph_giant_component(const struct PgGraph *graph);

// Copies `graph`, attaches the subscription flags and runs the
// subscription phase.
//
// # Safety
// `graph` must be a live handle, `subscriptions` must point to `len`
// readable bools, and `out` must be writable.
enum PgStatus pg_network_new(const struct PgGraph *graph,
                             const bool *subscriptions,
                             size_t len,
                             struct PgNetwork **out);

// Like [`pg_network_new`], subscribing each node independently with
// probability `sigma`.
//
// # Safety
// `graph` must be a live handle and `out` writable.
enum PgStatus pg_network_random(const struct PgGraph *graph,
                                double sigma,
                                uint64_t seed,
                                struct PgNetwork **out);

// # Safety
// `network` must be null or a live handle.
void pg_network_free(struct PgNetwork *network);

// Number of subscribers.
//
// # Safety
// `network` must be null or a live handle.
size_t pg_network_subscriber_count(const struct PgNetwork *network);

// Publishes one event. `ttl` of zero means unlimited.
//
// # Safety
// `network` must be a live handle and `out` writable.
enum PgStatus pg_network_publish(const struct PgNetwork *network,
                                 size_t publisher,
                                 double gamma,
                                 uint32_t ttl,
                                 uint64_t seed,
                                 struct PgDissemination *out);

// Exact receiver-count distribution of `network`, written to `pmf[0..=n]`.
//
// # Safety
// `network` must be a live handle and `pmf` must point to `len` writable
// doubles.
enum PgStatus pg_network_oracle(const struct PgNetwork *network,
                                size_t publisher,
                                double gamma,
                                double *pmf,
                                size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PUBSUB_GOSSIP_H */
