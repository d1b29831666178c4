#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "socnet/graph.hpp"
#include "socnet/rand.hpp"

namespace socnet {

// Generator for school-like signed networks: sparse trait-driven nucleation
// inside each course, then growth where each proposed relationship is signed
// by a logistic function of its current triadic influence.
struct SynthConfig {
  int n_schools = 1;
  int courses_per_school = 3;
  int students_per_course = 85;
  double target_mean_out_degree = 18.0;

  // attribute sampling
  std::array<double, 4> prosociality_weights = {0.10, 0.25, 0.40, 0.25};  // levels 0,1/3,2/3,1
  std::array<double, 4> crt_weights = {0.30, 0.30, 0.25, 0.15};
  double nonbinary_rate = 0.001;

  // nucleation: P(friend) = sigmoid(alpha*(p_i + p_j) + beta)
  double nucleation_fraction = 0.45;  // share of trait-signed relationships overall
  double trait_alpha = 0.73316;       // calibrated to P(friend|0,0)=0.30,
  double trait_beta = -0.84730;       // P(friend|1,1)=0.65
  // seed relationships cluster into pods (friendship circles), assortative
  // in prosociality; prosocial pods are proportionally more active, and the
  // remaining trait pairs over-sample selfish students (friction pairs)
  int pod_size = 24;
  double pod_nucleation_bias = 0.60;  // share of seed pairs drawn inside one pod
  double pod_rate_floor = 4.0;        // pod activity ~ floor + mean prosociality
  double pod_pair_exponent = 0.65;    // activity ~ (ordered pairs)^exponent
  double friction_weight = 2.2;       // friction-pair endpoint weight ~ 1 + w*(1-p)
  // nomination budget: placements are rejected once a student's out-degree
  // (or in-degree) exceeds this multiple of the target mean, mirroring the
  // bounded survey effort per student
  double degree_cap_factor = 1.8;

  // growth: P(friend) = sigmoid((I_ij - mu) / s)
  double influence_midpoint = 5.0;  // mu
  double influence_scale = 2.0;     // s
  // share of growth proposals drawn from positive mediated introductions
  // (i -> k -> j with both mediating ties friendly); the rest are uniform
  // in-course pairs
  double mediated_fraction = 0.97;
  // Before the sign draw, a proposed pair declares a relationship at all
  // with probability floor + (1 - floor) * sigmoid((I - gate_midpoint)/
  // gate_scale): structurally embedded pairs are salient, the rest mostly
  // stay undeclared (enmity instead enters through the trait channel and the
  // floor). The sign of a declared edge still follows the growth logistic
  // exactly.
  double declaration_floor = 0.002;
  double gate_midpoint = 6.5;
  double gate_scale = 0.6;
  // Nominations are answered: after a declared edge, the reverse edge forms
  // with this probability, copying the sign (magnitude drawn per the split).
  double reciprocation_rate = 0.8;

  // magnitude split inside each sign class
  double friend_plus1_fraction = 0.55;  // +1 vs +2
  double enemy_minus1_fraction = 0.60;  // -1 vs -2

  double noise_flip_rate = 0.015;  // sign flipped after the draw
  bool allow_resign = false;      // growth may re-sign an existing edge
  std::uint64_t seed = 1;

  void validate() const;
};

// Sign probabilities and the declaration gate used by the generator.
double nucleation_friend_probability(double p_src, double p_dst, const SynthConfig& config);
double growth_friend_probability(double influence, const SynthConfig& config);
double declaration_salience(double influence, const SynthConfig& config);

// Attribute sampling + sparse intra-course seed edges signed by the trait
// logistic. The returned graph carries nucleation_fraction of the target
// edge count.
SignedDigraph nucleate(const SynthConfig& config);

// One growth step: proposes an ordered intra-course pair, signs it from the
// current triadic influence, draws the magnitude, applies noise. Returns
// false when the proposal was discarded (existing edge or self pair).
bool evolve_step(SignedDigraph& g, const SynthConfig& config, Rng& rng);

// nucleate + evolve until the target mean out-degree is reached.
SignedDigraph generate(const SynthConfig& config);

// Multi-school corpus with per-school structural variation (degree, balance
// of magnitudes, nucleation share vary deterministically per school), used
// for the treatment comparisons.
SignedDigraph generate_corpus(const SynthConfig& config, double variation = 0.35);

struct PlantedNetwork {
  SignedDigraph graph;            // random signed digraph (weights are noise)
  std::vector<Edge> edge_list;    // declared edges, canonical order
  std::vector<int> labels;        // planted labels after flip noise
  std::vector<int> clean_labels;  // threshold rule before noise
};

// Validation fixture: random signed digraph; label(i,j) = [I_ij > theta]
// flipped with probability eta. Influence is computed on the random weights,
// so a threshold on I recovers clean labels exactly.
PlantedNetwork planted_threshold_network(int n, double theta, double eta, std::uint64_t seed,
                                         double density = 0.3);

void write_nodes_csv(std::ostream& out, const SignedDigraph& g);
void write_edges_csv(std::ostream& out, const SignedDigraph& g);
void write_planted_labels_csv(std::ostream& out, const PlantedNetwork& net);

}  // namespace socnet
