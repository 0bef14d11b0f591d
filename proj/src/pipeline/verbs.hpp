#pragma once

#include <iosfwd>

#include "bpred/pipeline/pipeline.hpp"

namespace bpred::pipeline::verbs {

void sim(const Settings& s, std::ostream& out);
void label(const Settings& s, std::ostream& out);
void split(const Settings& s, std::ostream& out);
void select(const Settings& s, std::ostream& out);
void train_clf(const Settings& s, std::ostream& out);
void eval_clf(const Settings& s, std::ostream& out);
void train_pred(const Settings& s, std::ostream& out);
void eval_pred(const Settings& s, std::ostream& out);
void predict(const Settings& s, std::ostream& out);
void report(const Settings& s, std::ostream& out);

}  // namespace bpred::pipeline::verbs
