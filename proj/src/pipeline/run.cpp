#include <functional>
#include <ostream>

#include "bpred/pipeline/pipeline.hpp"
#include "verbs.hpp"

namespace bpred::pipeline {

namespace {

struct Verb {
    std::string name;
    void (*fn)(const Settings&, std::ostream&);
    std::string help;
};

const std::vector<Verb>& table() {
    static const std::vector<Verb> t{
        {"sim", verbs::sim, "generate the synthetic situations (sim.*) into <work>/sim"},
        {"label", verbs::label, "compute TTLC and maneuver labels into <work>/labeled"},
        {"split", verbs::split, "partition situations and build balanced folds into <work>/split.json"},
        {"select", verbs::select, "compute feature sets A, B, C and the wrapper sets D into <work>/features"},
        {"train-clf", verbs::train_clf, "choose feature set and hyperparameters by CV, fit classifiers into <work>/models"},
        {"eval-clf", verbs::eval_clf, "test-fold BACC, ROC/AUC, working points and detection times"},
        {"train-pred", verbs::train_pred, "fit expert, pooled, integrated and confidence mixtures"},
        {"eval-pred", verbs::eval_pred, "log-likelihoods, spatial errors and confidence on the position test set"},
        {"report", verbs::report, "write CSV report files and summary.json into <work>/report"},
        {"predict", verbs::predict, "map a feature CSV (predict.input) to predictive distributions (predict.output)"},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& verb_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : table()) v.push_back(e.name);
        v.push_back("all");
        return v;
    }();
    return names;
}

std::string verb_help(const std::string& verb) {
    if (verb == "all") return "run sim through report in order";
    for (const auto& e : table())
        if (e.name == verb) return e.help;
    throw DomainError("unknown verb '" + verb + "'");
}

void run_verb(const std::string& verb, const Settings& settings, std::ostream& out) {
    if (verb == "all") {
        for (const auto& e : table()) {
            if (e.name == "predict") continue;
            e.fn(settings, out);
            out.flush();
        }
        return;
    }
    for (const auto& e : table())
        if (e.name == verb) {
            e.fn(settings, out);
            return;
        }
    throw DomainError("unknown verb '" + verb + "'");
}

int run(const std::string& verb, const Config& config, std::ostream& out, std::ostream& err) {
    const auto& names = verb_names();
    if (std::find(names.begin(), names.end(), verb) == names.end()) {
        err << "unknown verb '" << verb << "'\nverbs:";
        for (const auto& n : names) err << ' ' << n;
        err << '\n';
        return 64;
    }
    try {
        run_verb(verb, load_settings(config), out);
        return 0;
    } catch (const ConfigError& e) {
        err << "config error [" << e.key() << "]: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        err << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace bpred::pipeline
