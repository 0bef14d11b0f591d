// Command line front end: one subcommand per pipeline verb.

#include <omp.h>

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bpred/pipeline/pipeline.hpp"

using namespace bpred;

int main(int argc, char** argv) {
    CLI::App app{"Maneuver classification and probabilistic position prediction pipeline"};
    app.require_subcommand(0, 1);
    std::string config_file;
    std::vector<std::string> overrides;
    int threads = 0;
    app.add_option("-c,--config", config_file, "key=value config file")->check(CLI::ExistingFile);
    app.add_option("-s,--set", overrides, "override one config entry, key=value (repeatable)");
    app.add_option("-t,--threads", threads, "cap on OpenMP worker threads")->check(CLI::NonNegativeNumber);

    std::vector<CLI::App*> subs;
    for (const auto& verb : pipeline::verb_names()) {
        auto* sub = app.add_subcommand(verb, pipeline::verb_help(verb));
        sub->fallthrough();
        subs.push_back(sub);
    }
    app.allow_extras();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::string verb;
    for (auto* s : subs)
        if (s->parsed()) verb = s->get_name();
    if (verb.empty()) {
        const auto extras = app.remaining();
        if (!extras.empty()) {
            // unknown verb: let run() print the usage
            return pipeline::run(extras.front(), pipeline::Config{}, std::cout, std::cerr);
        }
        std::cerr << app.help();
        return 64;
    }
    if (!app.remaining().empty()) {
        std::cerr << "unexpected argument '" << app.remaining().front() << "'\n";
        return 64;
    }
    if (threads > 0) omp_set_num_threads(threads);

    pipeline::Config config;
    try {
        if (!config_file.empty()) config = pipeline::Config::load(config_file);
        for (const auto& o : overrides) config.set_assignment(o);
    } catch (const pipeline::ConfigError& e) {
        std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    }
    return pipeline::run(verb, config, std::cout, std::cerr);
}
