#include <algorithm>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <puclust/data.hpp>
#include <puclust/harness.hpp>

int main(int argc, char** argv)
{
    CLI::App app{"PU learning experiments with cluster-based label cleaning"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    auto* run = app.add_subcommand("run", "run the experiment grid described by a config file");
    run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_override, "output directory (overrides out_dir)");
    bool quiet = false;
    run->add_flag("--quiet", quiet, "no progress output");

    std::string raw_path, summary_out;
    auto* summ = app.add_subcommand("summarize", "rebuild summary tables from a raw results file");
    summ->add_option("--raw", raw_path, "raw.csv")->required()->check(CLI::ExistingFile);
    summ->add_option("--out", summary_out, "output directory")->required();

    auto* datasets = app.add_subcommand("datasets", "dataset utilities");
    datasets->require_subcommand(1);
    std::string describe_path, target = "target";
    double corr_threshold = 0.9;
    auto* describe = datasets->add_subcommand("describe", "preprocess a CSV and print its summary row");
    describe->add_option("path", describe_path, "CSV file")->required()->check(CLI::ExistingFile);
    describe->add_option("--target", target, "target column")->capture_default_str();
    describe->add_option("--corr-threshold", corr_threshold, "correlation drop threshold")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = puclust::load_config(config_path);
            if (!out_override.empty()) cfg.out_dir = out_override;
            const auto result = puclust::run_experiment(cfg, quiet ? nullptr : &std::clog);
            for (const auto& p : puclust::emit_report(result.rows, cfg.out_dir)) std::cout << p << "\n";
            if (result.failed_cells > 0) {
                std::cerr << result.failed_cells << " cell(s) failed\n";
                return static_cast<int>(std::min<std::size_t>(result.failed_cells, 255));
            }
        } else if (*summ) {
            const auto rows = puclust::read_raw_csv(raw_path);
            for (const auto& p : puclust::write_summaries(rows, summary_out)) std::cout << p << "\n";
            const auto failed = static_cast<std::size_t>(
                std::count_if(rows.begin(), rows.end(), [](const puclust::ResultRow& r) { return !r.ok(); }));
            if (failed > 0) return static_cast<int>(std::min<std::size_t>(failed, 255));
        } else if (*describe) {
            puclust::PreprocessConfig pc;
            pc.corr_threshold = corr_threshold;
            const auto raw = puclust::load_csv(describe_path, target);
            const std::string name = std::filesystem::path(describe_path).stem().string();
            const auto ds = puclust::preprocess(raw, pc, name);
            puclust::write_summary_header(std::cout);
            puclust::write_summary_row(std::cout, name, puclust::summarize(ds));
            for (const auto& d : ds.dropped) std::cerr << "dropped " << d.name << ": " << d.reason << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
