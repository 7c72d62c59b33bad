#pragma once

// Declarative sweep configuration for the compare command. INI-shaped:
// [section] headers, key = value lines, # comments. Every key must be one
// the section defines; anything unrecognized is a hard error rather than a
// silently ignored typo. Syntax problems raise ParseError with the line
// number, semantic problems raise ConfigError.

#include <filesystem>
#include <string>
#include <vector>

#include "lsr/eval.hpp"
#include "lsr/synthetic.hpp"

namespace lsr {

struct CompareConfig {
    // [data]: either a store on disk plus a label file, or a synthetic spec.
    std::string store;
    std::string labels;
    bool synthetic = false;
    SyntheticConfig synth;  // seed is filled from the root seed at run time

    // [normalize]
    NormMode norm_mode = NormMode::dense;

    // [sweep]
    std::vector<Index> ks;
    std::vector<u64> seeds;  // explicit sketch seeds; empty means derive n_seeds
    Index n_seeds = 5;
    Index folds = 1;
    f64 test_fraction = 0.2;
    OversampleMode oversample;
    Index max_rows_per_slice = 1024;

    // [logreg]
    LogRegConfig logreg;

    // [output]
    std::string csv_path = "report.csv";
    std::string json_path = "report.json";
};

CompareConfig parse_compare_config(const std::filesystem::path& path);

}  // namespace lsr
