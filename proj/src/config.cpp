#include "dmatch/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dmatch/errors.hpp"

namespace dmatch {

namespace {

struct Entry {
    std::string value;
    int line;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(std::string_view sv) {
    const auto first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = sv.find_last_not_of(" \t\r");
    return std::string(sv.substr(first, last - first + 1));
}

std::map<std::string, Section> tokenize(const std::string& text) {
    std::map<std::string, Section> sections;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError("unterminated section header", line_no);
            }
            current = trim(std::string_view(line).substr(1, line.size() - 2));
            if (current.empty()) {
                throw ParseError("empty section name", line_no);
            }
            sections.try_emplace(current);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected key = value", line_no);
        }
        if (current.empty()) {
            throw ParseError("key outside any section", line_no);
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError("empty key or value", line_no);
        }
        auto [it, inserted] = sections[current].try_emplace(key, Entry{value, line_no});
        if (!inserted) {
            throw ParseError("duplicate key '" + key + "'", line_no);
        }
    }
    return sections;
}

double parse_double(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) {
            throw ParseError("trailing characters after number '" + s + "'", line);
        }
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'", line);
    }
}

std::vector<double> parse_list(const std::string& s, int line) {
    std::string body = s;
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
        body = body.substr(1, body.size() - 2);
    }
    std::vector<double> out;
    std::string item;
    std::istringstream in(body);
    while (std::getline(in, item, ',')) {
        const std::string v = trim(item);
        if (v.empty()) {
            throw ParseError("empty list item", line);
        }
        out.push_back(parse_double(v, line));
    }
    if (out.empty()) {
        throw ParseError("empty list", line);
    }
    return out;
}

class Reader {
  public:
    Reader(std::map<std::string, Section>& sections, const std::string& name)
        : section_(lookup(sections, name)), name_(name) {}

    bool present() const { return section_ != nullptr; }

    double number(const std::string& key) {
        Entry& e = require(key);
        return parse_double(e.value, e.line);
    }

    double number_or(const std::string& key, double fallback) {
        Entry* e = find(key);
        return e ? parse_double(e->value, e->line) : fallback;
    }

    std::optional<std::vector<double>> list_opt(const std::string& key) {
        Entry* e = find(key);
        if (!e) {
            return std::nullopt;
        }
        return parse_list(e->value, e->line);
    }

    std::string string_or(const std::string& key, std::string fallback) {
        Entry* e = find(key);
        if (!e) {
            return fallback;
        }
        std::string v = e->value;
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
            v = v.substr(1, v.size() - 2);
        }
        return v;
    }

    void finish() const {
        if (!section_) {
            return;
        }
        for (const auto& [key, e] : *section_) {
            if (!e.used) {
                throw ParseError("unknown key '" + key + "' in [" + name_ + "]", e.line);
            }
        }
    }

  private:
    static Section* lookup(std::map<std::string, Section>& sections, const std::string& name) {
        auto it = sections.find(name);
        return it == sections.end() ? nullptr : &it->second;
    }

    Entry* find(const std::string& key) {
        if (!section_) {
            return nullptr;
        }
        auto it = section_->find(key);
        if (it == section_->end()) {
            return nullptr;
        }
        it->second.used = true;
        return &it->second;
    }

    Entry& require(const std::string& key) {
        Entry* e = find(key);
        if (!e) {
            throw ParseError("missing required key '" + key + "' in [" + name_ + "]", 0);
        }
        return *e;
    }

    Section* section_;
    std::string name_;
};

} // namespace

ScenarioFile parse_scenario_text(const std::string& text) {
    auto sections = tokenize(text);
    const std::set<std::string> known{"chi", "model", "scenario", "plant", "output"};
    for (const auto& [name, sec] : sections) {
        if (!known.contains(name)) {
            throw ParseError("unknown section [" + name + "]",
                             sec.empty() ? 0 : sec.begin()->second.line);
        }
    }

    Reader chi(sections, "chi");
    if (!chi.present()) {
        throw ParseError("missing required section [chi]", 0);
    }
    ChiParams params{};
    params.chi1 = chi.number("chi1");
    params.chi2 = chi.number("chi2");
    params.chi3 = chi.number("chi3");
    params.k2 = chi.number("k2");
    chi.finish();

    Reader model(sections, "model");
    if (!model.present()) {
        throw ParseError("missing required section [model]", 0);
    }
    std::optional<ModelSpec> spec;
    if (auto tc = model.list_opt("time_constants")) {
        spec = ModelSpec::from_time_constants(*tc);
    } else {
        auto num = model.list_opt("num");
        auto den = model.list_opt("den");
        if (!num || !den) {
            throw ParseError("[model] needs time_constants or num and den", 0);
        }
        spec = ModelSpec::from_tf(RationalTF(QuasiPoly::from_s_coeffs(*num),
                                             QuasiPoly::from_s_coeffs(*den)));
    }
    model.finish();

    ScenarioFile file{params, std::move(*spec)};

    Reader scenario(sections, "scenario");
    if (scenario.present()) {
        file.has_scenario = true;
        auto& s = file.scenario;
        s.tau = scenario.number_or("tau", s.tau);
        s.step = scenario.number_or("step", s.step);
        s.horizon = scenario.number_or("horizon", s.horizon);
        s.ybar1 = scenario.number_or("ybar1", s.ybar1);
        s.ybar2 = scenario.number_or("ybar2", s.ybar2);
        s.w1_step_frac = scenario.number_or("w1_step_frac", s.w1_step_frac);
        s.r_step_frac = scenario.number_or("r_step_frac", s.r_step_frac);
        s.lambda01 = scenario.number_or("lambda01", s.lambda01);
        s.lambda11 = scenario.number_or("lambda11", s.lambda11);
        s.y2_offset = scenario.number_or("y2_offset", s.y2_offset);
        scenario.finish();
    }

    Reader plant(sections, "plant");
    if (plant.present()) {
        PlantConfig cfg{};
        cfg.r_w = plant.number("r_w");
        cfg.b_w = plant.number("b_w");
        cfg.a11 = plant.number_or("a11", 0.0);
        cfg.a12 = plant.number_or("a12", 0.0);
        cfg.a13 = plant.number_or("a13", 0.0);
        cfg.a14 = plant.number_or("a14", 0.0);
        cfg.a15 = plant.number("a15");
        cfg.a21 = plant.number_or("a21", 0.0);
        cfg.a22 = plant.number_or("a22", 0.0);
        cfg.a23 = plant.number_or("a23", 0.0);
        cfg.a24 = plant.number_or("a24", 0.0);
        cfg.a25 = plant.number_or("a25", 0.0);
        cfg.a26 = plant.number("a26");
        plant.finish();
        if (cfg.a15 == 0.0 || cfg.a26 == 0.0) {
            throw ParseError("[plant] a15 and a26 must be non-zero", 0);
        }
        if (!(cfg.r_w > 0.0) || !(cfg.b_w > 0.0)) {
            throw ParseError("[plant] r_w and b_w must be positive", 0);
        }
        file.plant = cfg;
    }

    Reader output(sections, "output");
    if (output.present()) {
        file.csv_path = output.string_or("csv", "");
        output.finish();
    }
    return file;
}

ScenarioFile parse_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open scenario file '" + path.string() + "'", 0);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

SimScenario ScenarioFile::make_sim_scenario() const {
    const GainSet gains = derive_gains(chi, scenario.lambda01, scenario.lambda11);
    SimScenario sc = make_step_scenario(chi, gains, model, scenario.tau,
                                        scenario.ybar1, scenario.ybar2,
                                        scenario.w1_step_frac, scenario.r_step_frac);
    sc.h = scenario.step;
    sc.horizon = scenario.horizon;
    sc.y2_0 += scenario.y2_offset;
    sc.plant = plant;
    return sc;
}

} // namespace dmatch
