#include "polymkl/harness.hpp"

#include <exception>
#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    using namespace polymkl;
    try {
        const RunConfig cfg = parse_cli(argc, argv);
        if (!cfg.scaling_r.empty()) {
            ScalingOptions opts;
            opts.degree = cfg.degree;
            opts.iterations = cfg.iterations;
            opts.seeds = cfg.scaling_seeds;
            opts.include_constant = cfg.include_constant;
            opts.lambda = cfg.lambda;
            const std::filesystem::path path = cfg.out + ".scaling.csv";
            if (!cfg.overwrite && std::filesystem::exists(path)) throw Error("output file exists: " + path.string());
            const auto rows = run_scaling_study(cfg.scaling_r, cfg.synthetic->spec, opts, &std::cerr);
            write_scaling_csv(std::cout, rows);
            auto f = open_output(path);
            write_scaling_csv(f, rows);
            return 0;
        }
        run_experiment(cfg, &std::cout);
        return 0;
    } catch (const HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
