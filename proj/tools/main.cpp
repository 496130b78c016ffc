#include <exception>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "resonant/errors.hpp"

using namespace resonant::cli;

namespace {

void add_reservoir_flags(CLI::App* cmd, ReservoirFlags& f) {
    cmd->add_option("--hps", f.hps, "hyper-parameter JSON file");
    cmd->add_flag("--feedback", f.feedback, "feed the previous target back as an input");
    cmd->add_option("--seed", f.seed, "reservoir seed");
    cmd->add_option("--activation", f.activation, "activation or mix, e.g. tanh=0.1,relu=0.9,sin=0.05");
    cmd->add_option("--output-activation", f.output_activation, "identity or tanh");
    cmd->add_option("--washout", f.washout, "leading rows excluded from the readout fit");
    cmd->add_option("--theta-star", f.theta_star, "linear band of the hybrid activation");
    cmd->add_option("--input-scaling", f.input_scaling, "input weight scale");
}

void add_experiment_flags(CLI::App* cmd, ExperimentCliOptions& o) {
    cmd->add_option("--config", o.config, "experiment document (.toml or .json)");
    cmd->add_option("--preset", o.preset, "built-in experiment preset");
    cmd->add_option("--seed", o.seed, "reservoir seed override");
    cmd->add_option("--out-dir", o.out_dir, "output directory")->required();
    cmd->add_flag("--timing", o.timing, "also write wall-clock timings to timing.json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reservoir computing forecasts of the forced pendulum"};
    app.require_subcommand(1);
    std::function<int()> action;

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate-data", "integrate a forced-pendulum trajectory");
    g->add_option("--force", gen.force, "sin or sincos");
    g->add_option("--amp", gen.amplitude, "force amplitude");
    g->add_option("--freq", gen.frequency, "force angular frequency");
    g->add_option("--dt", gen.dt, "time step");
    g->add_option("--steps", gen.steps, "number of samples");
    g->add_option("--x0", gen.x0, "initial position");
    g->add_option("--p0", gen.p0, "initial momentum");
    g->add_option("--noise", gen.noise, "uniform noise amplitude");
    g->add_option("--seed", gen.seed, "noise seed");
    g->add_option("--out", gen.out, "trajectory CSV")->required();
    g->add_option("--force-out", gen.force_out, "force series CSV (t,f)");
    g->add_option("--split", gen.split, "also write <out>.train/.test split at this fraction");
    g->callback([&] { action = [&] { return cmd_generate(gen); }; });

    FitOptions fit;
    auto* f = app.add_subcommand("fit", "train a reservoir readout");
    add_reservoir_flags(f, fit.reservoir);
    f->add_option("--target", fit.target, "target CSV")->required();
    f->add_option("--input", fit.input, "exogenous input CSV");
    f->add_option("--out", fit.out, "model JSON")->required();
    f->callback([&] { action = [&] { return cmd_fit(fit); }; });

    PredictOptions pred;
    auto* p = app.add_subcommand("predict", "forecast with a fitted model");
    p->add_option("--model", pred.model, "model JSON")->required();
    p->add_option("--steps", pred.steps, "number of steps");
    p->add_option("--input", pred.input, "exogenous input CSV");
    p->add_option("--out", pred.out, "prediction CSV")->required();
    p->callback([&] { action = [&] { return cmd_predict(pred); }; });

    TestOptions tst;
    auto* t = app.add_subcommand("test", "forecast and score against a target");
    t->add_option("--model", tst.model, "model JSON")->required();
    t->add_option("--target", tst.target, "target CSV")->required();
    t->add_option("--input", tst.input, "exogenous input CSV");
    t->add_option("--criterion", tst.criterion, "nmse or mse");
    t->add_option("--out", tst.out, "score JSON")->required();
    t->add_option("--prediction-out", tst.prediction_out, "prediction CSV with truth and residuals");
    t->callback([&] { action = [&] { return cmd_test(tst); }; });

    OptimizeCliOptions opt;
    auto* o = app.add_subcommand("optimize", "trust-region Bayesian hyper-parameter search");
    add_reservoir_flags(o, opt.reservoir);
    o->add_option("--bounds", opt.bounds, "search-space TOML (default: standard bounds)");
    o->add_option("--config", opt.config, "experiment document supplying the data");
    o->add_option("--target", opt.target, "target CSV");
    o->add_option("--input", opt.input, "exogenous input CSV");
    o->add_option("--validation-fraction", opt.validation_fraction, "trailing fraction scored");
    o->add_option("--criterion", opt.criterion, "nmse or mse");
    o->add_option("--n-trust-regions", opt.n_trust_regions, "parallel trust regions");
    o->add_option("--max-evals", opt.max_evals, "evaluation budget");
    o->add_option("--initial-samples", opt.initial_samples, "Sobol points per trust region");
    o->add_option("--batch-size", opt.batch_size, "proposals per trust region and round");
    o->add_option("--bo-seed", opt.seed, "optimizer seed");
    o->add_option("--resume", opt.resume, "trial log of an interrupted run");
    o->add_flag("--timing", opt.timing, "record wall-clock time per trial");
    o->add_option("--out", opt.out, "best hyper-parameters JSON")->required();
    o->add_option("--log", opt.log, "trial log CSV")->required();
    o->callback([&] { action = [&] { return cmd_optimize(opt); }; });

    HeatmapCliOptions heat;
    auto* h = app.add_subcommand("heatmap", "transfer NMSE over an amplitude x frequency grid");
    h->add_option("--config", heat.config, "heatmap document (.toml or .json)");
    h->add_option("--family", heat.family, "sin or sincos");
    h->add_option("--mode", heat.mode, "pure or parameter_aware");
    h->add_option("--amplitudes", heat.amplitudes, "comma-separated amplitudes");
    h->add_option("--frequencies", heat.frequencies, "comma-separated frequencies");
    h->add_option("--seed", heat.seed, "reservoir seed");
    h->add_option("--hps", heat.hps, "hyper-parameter JSON file");
    h->add_option("--out", heat.out, "matrix CSV")->required();
    h->add_option("--svg", heat.svg, "heatmap SVG (default: <out>.svg)");
    h->callback([&] { action = [&] { return cmd_heatmap(heat); }; });

    PlotOptionsCli plot;
    auto* pl = app.add_subcommand("plot", "render a prediction CSV as SVG");
    pl->add_option("--kind", plot.kind, "trajectory, residual or phase");
    pl->add_option("--in", plot.in, "prediction CSV")->required();
    pl->add_option("--out", plot.out, "SVG file")->required();
    pl->callback([&] { action = [&] { return cmd_plot(plot); }; });

    ExperimentCliOptions fc;
    auto* fcmd = app.add_subcommand("forecast", "run a forecasting experiment end to end");
    add_experiment_flags(fcmd, fc);
    fcmd->callback([&] { action = [&] { return cmd_forecast(fc); }; });

    ExperimentCliOptions ns;
    auto* ncmd = app.add_subcommand("noise-study", "train on noisy data, score against the clean orbit");
    add_experiment_flags(ncmd, ns);
    ncmd->callback([&] { action = [&] { return cmd_noise_study(ns); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        return action();
    } catch (const resonant::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
