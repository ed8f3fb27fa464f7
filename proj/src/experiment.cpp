#include "mulimit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <thread>

#include "mulimit/ca_engine.hpp"
#include "mulimit/errors.hpp"

namespace mulimit {

namespace {

std::vector<Word> parse_queries(const ExperimentConfig& c) {
    const Alphabet a = c.query_alphabet();
    std::vector<Word> out;
    for (const auto& q : c.queries) {
        out.push_back(a.parse(q));
    }
    return out;
}

void sample_densities(std::vector<DensitySeries>& series, std::uint64_t t, const CyclicWindow& w) {
    for (auto& s : series) {
        s.samples[t] = window_density(w, s.word).to_double();
    }
}

std::string fmt(double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", d);
    return buf;
}

} // namespace

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial) {
    config.validate();
    if (config.mode == Mode::Oracle) {
        throw ContractViolation("run_trial: oracle mode has no trials");
    }
    TrialResult r;
    for (const Word& q : parse_queries(config)) {
        DensitySeries s;
        s.word = q;
        r.densities.push_back(std::move(s));
    }
    if (config.mode == Mode::MaxFixture) {
        const LocalRule rule = max_automaton();
        CyclicWindow w = sample_window(rule.alphabet, config.N, config.seed, 0.0, trial);
        for (std::uint64_t t = 0;; ++t) {
            if (t % config.stride == 0) {
                sample_densities(r.densities, t, w);
            }
            if (t == config.T) {
                break;
            }
            w = step(rule, w);
        }
        r.quiescence = 0;
        return r;
    }
    Construction c = Construction::sampled(config.construction_params(), config.N, config.seed,
                                           config.star_density, trial);
    for (std::uint64_t t = 0;; ++t) {
        if (t % config.stride == 0) {
            sample_densities(r.densities, t, c.project());
            r.segments.push_back(segment_stats(c.cells(), t));
        }
        if (t == config.T) {
            break;
        }
        c.advance();
    }
    r.quiescence = c.quiescence_time();
    r.worst_workspace_slack = c.worst_workspace_slack();
    const auto kc = c.counter_time_constant();
    for (const auto& e : c.sharp_events()) {
        ++r.sharp_created;
        r.sharp_late += e.time > e.partner_distance * kc ? 1 : 0;
    }
    r.merges = c.merge_events().size();
    return r;
}

const SeriesSummary* ExperimentResult::series(const std::string& name) const {
    for (const auto& s : segment_series) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers) {
    config.validate();
    ExperimentResult out;
    out.alphabet = config.query_alphabet();
    out.trials.resize(config.trials);
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.trials));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned id) {
        try {
            for (std::size_t k; (k = next.fetch_add(1)) < config.trials;) {
                out.trials[k] = run_trial(config, k);
            }
        } catch (...) {
            errors[id] = std::current_exception();
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) {
            pool.emplace_back(work, i);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    for (std::size_t q = 0; q < config.queries.size(); ++q) {
        std::vector<DensitySeries> per;
        for (const auto& tr : out.trials) {
            per.push_back(tr.densities[q]);
        }
        out.densities.push_back(average(per));
    }

    if (config.transient) {
        out.transient = *config.transient;
    } else {
        // every counter is gone once the counter layer is quiescent
        for (const auto& tr : out.trials) {
            out.transient = std::max(out.transient, tr.quiescence.value_or(config.T));
        }
        out.transient = std::min<std::uint64_t>(out.transient, config.T - (config.T > 0 ? 1 : 0));
    }
    for (const auto& s : out.densities) {
        out.verdicts.push_back(classify(s, out.transient));
    }

    if (config.mode == Mode::ConstructRun) {
        std::map<std::string, std::map<std::uint64_t, Accumulator>> acc;
        std::set<std::size_t> buckets;
        for (const auto& tr : out.trials) {
            for (const auto& s : tr.segments) {
                for (auto [b, n] : s.class_cells) {
                    buckets.insert(b);
                }
            }
        }
        for (const auto& tr : out.trials) {
            for (const auto& s : tr.segments) {
                acc["sharp"][s.time].add(s.sharp_density());
                acc["out_of_segment"][s.time].add(s.out_of_segment());
                acc["compute"][s.time].add(s.compute_share());
                acc["sep1"][s.time].add(s.share(s.sep1_cells));
                acc["sep2"][s.time].add(s.share(s.sep2_cells));
                for (std::size_t b : buckets) {
                    auto it = s.class_cells.find(b);
                    acc[std::to_string(b)][s.time].add(
                        it == s.class_cells.end() ? 0.0 : s.share(it->second));
                }
            }
        }
        std::vector<std::string> order{"sharp", "out_of_segment", "compute", "sep1", "sep2"};
        for (std::size_t b : buckets) {
            order.push_back(std::to_string(b));
        }
        for (const auto& name : order) {
            SeriesSummary s;
            s.name = name;
            for (const auto& [t, a] : acc[name]) {
                s.mean[t] = a.mean();
            }
            out.segment_series.push_back(std::move(s));
        }
    }
    return out;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
    const Alphabet& alphabet = result.alphabet;
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) {
            throw std::runtime_error("cannot write " + (dir / name).string());
        }
        return f;
    };
    {
        auto f = open("densities.csv");
        f << "time,word,density,trials\n";
        for (const auto& s : result.densities) {
            const std::string w = alphabet.render(s.word);
            for (auto [t, v] : s.samples) {
                f << t << "," << w << "," << fmt(v) << "," << s.trials << "\n";
            }
        }
    }
    {
        auto f = open("segments.csv");
        f << "time,bucket,share\n";
        for (const auto& s : result.segment_series) {
            for (auto [t, v] : s.mean) {
                f << t << "," << s.name << "," << fmt(v) << "\n";
            }
        }
    }
    {
        auto f = open("verdicts.csv");
        f << "word,class,final_mean,first_mean,peak,transient,horizon,samples,decay_ratio,"
             "persist_ratio,note\n";
        for (const auto& v : result.verdicts) {
            f << alphabet.render(v.word) << "," << verdict_name(v.cls) << "," << fmt(v.final_mean)
              << "," << fmt(v.first_mean) << "," << fmt(v.peak) << "," << v.transient << ","
              << v.horizon << "," << v.samples << "," << fmt(v.decay_ratio) << ","
              << fmt(v.persist_ratio) << "," << v.note << "\n";
        }
    }
}

std::uint8_t palette_level(const CellState& cell) {
    if (cell.main == kSharp) {
        switch (cell.mark) {
        case MergeMark::L: return 16;
        case MergeMark::R: return 24;
        case MergeMark::Both: return 8;
        case MergeMark::None: return 0;
        }
    }
    if (cell.main == kStar) {
        return 32;
    }
    if (cell.tokens != 0) {
        return 64;
    }
    if (cell.probes != 0) {
        return 112;
    }
    if (cell.compute) {
        return 176;
    }
    switch (cell.main) {
    case kBlank: return 255;
    case kSep1: return 96;
    case kSep2: return 128;
    default: break;
    }
    const Symbol i = cell.main - kFirstOutput;
    if (i >= 8) {
        throw ContractViolation("palette: at most 8 output symbols");
    }
    return static_cast<std::uint8_t>(192 + 8 * i);
}

std::uint8_t palette_level(Symbol s, std::size_t alphabet_size) {
    if (alphabet_size < 2 || s >= alphabet_size) {
        throw ContractViolation("palette: symbol outside the alphabet");
    }
    return static_cast<std::uint8_t>(255 - (255 * s) / (alphabet_size - 1));
}

void write_diagram(const ExperimentConfig& config, std::size_t trial, std::ostream& out) {
    config.validate();
    out << "P2\n" << config.N << " " << config.T + 1 << "\n255\n";
    auto row = [&](auto level_of) {
        for (std::size_t i = 0; i < config.N; ++i) {
            out << (i ? " " : "") << static_cast<unsigned>(level_of(i));
        }
        out << "\n";
    };
    if (config.mode == Mode::MaxFixture) {
        const LocalRule rule = max_automaton();
        CyclicWindow w = sample_window(rule.alphabet, config.N, config.seed, 0.0, trial);
        for (std::uint64_t t = 0;; ++t) {
            row([&](std::size_t i) { return palette_level(w[i], rule.alphabet.size()); });
            if (t == config.T) {
                break;
            }
            w = step(rule, w);
        }
        return;
    }
    if (config.mode != Mode::ConstructRun) {
        throw ContractViolation("write_diagram: oracle mode has no run");
    }
    Construction c = Construction::sampled(config.construction_params(), config.N, config.seed,
                                           config.star_density, trial);
    for (std::uint64_t t = 0;; ++t) {
        row([&](std::size_t i) { return palette_level(c.cells()[i]); });
        if (t == config.T) {
            break;
        }
        c.advance();
    }
}

OracleOutput run_oracle(const ExperimentConfig& config) {
    const LocalRule rule = rule_fixture(config.rule);
    const MeasureEstimate m = exact_measure(rule, rule.alphabet.parse(config.word), config.n);
    OracleOutput o;
    o.count = m.count;
    o.total = m.total;
    o.ratio = m.value.to_double();
    char buf[96];
    std::snprintf(buf, sizeof buf, "%llu %llu %.12g", static_cast<unsigned long long>(o.count),
                  static_cast<unsigned long long>(o.total), o.ratio);
    o.line = buf;
    return o;
}

} // namespace mulimit
