#pragma once

// File formats between the pipeline stages.
//
// Partial-sample file (sampler -> refinery):
//   #meta key=value            header lines
//   <h>;<v1>,<v2>,...,<v|V|>   one sample per line, '*' for undefined
//
// Training file (refinery -> learner), bit-exact contract:
//   #facts=<F>
//   <h>;<bitstring of length F>

#include <iosfwd>
#include <string>
#include <vector>

#include "samplan/sampler.hpp"

namespace samplan {

struct TrainingSet {
    std::int64_t facts = 0;
    std::vector<std::vector<std::uint8_t>> inputs;
    std::vector<double> targets;
    std::size_t size() const { return targets.size(); }
};

void write_partial_samples(std::ostream& out, const SampleSet& set);
SampleSet read_partial_samples(std::istream& in);

void write_training_set(std::ostream& out, const Task& task, const SampleSet& set);
TrainingSet read_training_set(std::istream& in);

void save_partial_samples(const std::string& path, const SampleSet& set);
SampleSet load_partial_samples(const std::string& path);
void save_training_set(const std::string& path, const Task& task, const SampleSet& set);
TrainingSet load_training_set(const std::string& path);

}  // namespace samplan
