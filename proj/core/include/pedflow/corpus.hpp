// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>

#include "pedflow/fusion.hpp"

namespace pedflow {

/// Noise model and densities of the synthetic detection corpus. The sensor
/// sits at the map origin; pedestrians walk mostly radial straight lines
/// through the sensing annulus, some side by side in pairs, while clutter
/// tracks (poles, bushes, carts) hold fixed positions for a bounded tracker
/// lifetime.
struct CorpusConfig {
    double duration_s = 1320.0;  ///< 22 minutes
    int pedestrian_tracks = 237;

    /// Fraction of pedestrians walking as one member of an in-file pair.
    double pair_fraction = 0.4;
    double pair_spacing_min_m = 0.7;
    double pair_spacing_max_m = 1.0;

    double clutter_tracks_per_min = 6.0;
    /// Fraction of clutter placed within a stride of a walkway.
    double clutter_near_fraction = 0.35;
    double clutter_life_min_s = 12.0;
    double clutter_life_max_s = 28.0;

    double frame_hz = 10.0;
    double miss_rate = 0.1;
    double false_detections_per_min = 3.0;
    double bearing_noise_rad = deg_to_rad(0.5);
    double calibration_bias_rad = deg_to_rad(2.0);  ///< constant extrinsic error
    double bbox_half_width_rad = deg_to_rad(1.2);

    double spawn_range_min_m = 8.0;
    double spawn_range_max_m = 16.0;
    double ped_speed_mps = 1.4;
    double ped_life_min_s = 8.0;
    double ped_life_max_s = 16.0;

    std::uint64_t seed = 1;
};

/// Throws ConfigError when densities or rates are out of range.
void validate_config(const CorpusConfig& config);

/// Perfectly separable preset: no noise, no bias, no misses, no clutter,
/// no false detections, no pairs.
CorpusConfig zero_noise_corpus_config();

/// Generates the labeled corpus: pedestrian and clutter ClusterTracks plus
/// the BBoxDetection stream with the configured miss rate, false-detection
/// rate, bearing noise, and constant calibration bias. Ground truth is
/// recorded on the tracks; detection source ids are kept for diagnostics.
LabeledCorpus generate_detection_corpus(const CorpusConfig& config);

/// Corpus directory format: cluster.csv (time,id,x,y,truth) and bbox.csv
/// (time,camera,left_rad,mid_rad,right_rad), plus meta.json with duration
/// and frame rate. Byte-identical output for identical corpora.
void write_corpus(const LabeledCorpus& corpus, const std::filesystem::path& dir);
LabeledCorpus read_corpus(const std::filesystem::path& dir);

}  // namespace pedflow
