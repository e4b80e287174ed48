#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "staggerbo/harness.hpp"

namespace stagger {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

long long to_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long n = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': '" + v + "'");
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "functions") {
            cfg.functions = split(value, ',');
        } else if (key == "methods") {
            cfg.methods = split(value, ',');
        } else if (key == "num_dim") {
            cfg.num_dim = static_cast<int>(to_int(value, key));
        } else if (key == "num_rounds") {
            cfg.num_rounds = static_cast<int>(to_int(value, key));
        } else if (key == "num_arms") {
            cfg.num_arms = static_cast<int>(to_int(value, key));
        } else if (key == "repeats") {
            cfg.repeats = static_cast<int>(to_int(value, key));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_int(value, key));
        } else if (key == "jobs") {
            cfg.jobs = static_cast<int>(to_int(value, key));
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string traces_to_csv(const std::vector<RunTrace>& traces) {
    std::string out = "method,function,repeat,round,best_so_far,wall_time_s\n";
    for (const auto& t : traces) {
        if (t.failed) continue;
        for (std::size_t i = 0; i < t.best_so_far.size(); ++i) {
            out += t.method + ',' + t.function + ',' + std::to_string(t.repeat) + ',' +
                   std::to_string(i) + ',' + fmt_double(t.best_so_far[i]) + ',' +
                   fmt_double(t.wall_time_s[i]) + '\n';
        }
    }
    return out;
}

std::vector<RunTrace> traces_from_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw ConfigError("traces csv: empty file");
    if (trim(line) != "method,function,repeat,round,best_so_far,wall_time_s")
        throw ConfigError("traces csv: unexpected header '" + trim(line) + "'");

    std::vector<RunTrace> traces;
    std::map<std::tuple<std::string, std::string, int>, std::size_t> index;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 6) throw ConfigError("traces csv: bad row '" + line + "'");
        const std::string& method = fields[0];
        const std::string& function = fields[1];
        const int repeat = static_cast<int>(to_int(fields[2], "repeat"));
        const int round = static_cast<int>(to_int(fields[3], "round"));
        const double best = std::stod(fields[4]);
        const double wall = std::stod(fields[5]);

        const auto key = std::make_tuple(method, function, repeat);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, traces.size()).first;
            RunTrace t;
            t.method = method;
            t.function = function;
            t.repeat = repeat;
            traces.push_back(std::move(t));
        }
        auto& t = traces[it->second];
        if (round != static_cast<int>(t.best_so_far.size()))
            throw ConfigError("traces csv: out-of-order round in '" + line + "'");
        t.best_so_far.push_back(best);
        t.wall_time_s.push_back(wall);
    }
    return traces;
}

std::string scores_to_csv(const ScoreTable& table) {
    std::string out = "method,score,se\n";
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
        out += table.methods[m] + ',' + fmt_double(table.scores[static_cast<Eigen::Index>(m)]) +
               ',' + fmt_double(table.std_errors[static_cast<Eigen::Index>(m)]) + '\n';
    }
    return out;
}

std::string diagnose_to_csv(const std::vector<DiagnoseRow>& rows) {
    std::string out =
        "sampler,seed,round,arm_seconds,best_so_far,rmse,bias,scale,std_p_max,duration\n";
    for (const auto& r : rows) {
        out += r.sampler + ',' + std::to_string(r.seed) + ',' + std::to_string(r.round) + ',' +
               fmt_double(r.arm_seconds) + ',' + fmt_double(r.best_so_far);
        if (r.has_diag) {
            out += ',' + fmt_double(r.diag.rmse) + ',' + fmt_double(r.diag.bias) + ',' +
                   fmt_double(r.diag.scale) + ',' + fmt_double(r.diag.std_p_max) + ',' +
                   fmt_double(r.diag.duration);
        } else {
            out += ",,,,,";
        }
        out += '\n';
    }
    return out;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Series {
    std::string name;
    std::vector<double> mean, lo, hi;
};

}  // namespace

std::string traces_to_svg(const std::vector<RunTrace>& traces) {
    std::map<std::string, std::vector<const RunTrace*>> by_method;
    std::vector<std::string> order;
    std::size_t rounds = 0;
    for (const auto& t : traces) {
        if (t.failed) continue;
        if (by_method.find(t.method) == by_method.end()) order.push_back(t.method);
        by_method[t.method].push_back(&t);
        rounds = std::max(rounds, t.best_so_far.size());
    }
    if (rounds == 0) throw ConfigError("traces_to_svg: no data");

    std::vector<Series> series;
    double ymin = 1e300, ymax = -1e300;
    for (const auto& name : order) {
        const auto& ts = by_method[name];
        Series s;
        s.name = name;
        for (std::size_t i = 0; i < rounds; ++i) {
            double sum = 0.0, sum2 = 0.0;
            int n = 0;
            for (const auto* t : ts) {
                if (i < t->best_so_far.size()) {
                    sum += t->best_so_far[i];
                    sum2 += t->best_so_far[i] * t->best_so_far[i];
                    ++n;
                }
            }
            const double mean = sum / n;
            const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
            const double se = n > 1 ? std::sqrt(var / n) : 0.0;
            s.mean.push_back(mean);
            s.lo.push_back(mean - 2.0 * se);
            s.hi.push_back(mean + 2.0 * se);
            ymin = std::min(ymin, s.lo.back());
            ymax = std::max(ymax, s.hi.back());
        }
        series.push_back(std::move(s));
    }
    if (ymax <= ymin) ymax = ymin + 1.0;

    const double width = 840, height = 520;
    const double ml = 80, mr = 190, mt = 30, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const auto px = [&](double round) {
        return ml + (rounds > 1 ? round / (static_cast<double>(rounds) - 1.0) : 0.5) * pw;
    };
    const auto py = [&](double y) { return mt + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << ' ' << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n";
    // axes
    svg << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
        << "' stroke='black'/>\n"
        << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
        << "' stroke='black'/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double frac = tick / 4.0;
        const double y = ymin + frac * (ymax - ymin);
        svg << "<text x='" << ml - 8 << "' y='" << py(y) + 4
            << "' font-size='12' text-anchor='end' font-family='sans-serif'>";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", y);
        svg << buf << "</text>\n";
        const double r = frac * (static_cast<double>(rounds) - 1.0);
        svg << "<text x='" << px(r) << "' y='" << mt + ph + 18
            << "' font-size='12' text-anchor='middle' font-family='sans-serif'>"
            << static_cast<int>(std::lround(r)) + 1 << "</text>\n";
    }
    svg << "<text x='" << ml + pw / 2 << "' y='" << height - 12
        << "' font-size='13' text-anchor='middle' font-family='sans-serif'>round</text>\n"
        << "<text x='18' y='" << mt + ph / 2
        << "' font-size='13' text-anchor='middle' font-family='sans-serif' transform='rotate(-90 "
           "18 "
        << mt + ph / 2 << ")'>best measured value</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % 10];
        svg << "<polygon fill='" << color << "' fill-opacity='0.15' stroke='none' points='";
        for (std::size_t i = 0; i < s.hi.size(); ++i)
            svg << px(static_cast<double>(i)) << ',' << py(s.hi[i]) << ' ';
        for (std::size_t i = s.lo.size(); i-- > 0;)
            svg << px(static_cast<double>(i)) << ',' << py(s.lo[i]) << ' ';
        svg << "'/>\n<polyline fill='none' stroke='" << color << "' stroke-width='1.8' points='";
        for (std::size_t i = 0; i < s.mean.size(); ++i)
            svg << px(static_cast<double>(i)) << ',' << py(s.mean[i]) << ' ';
        svg << "'/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(si);
        svg << "<line x1='" << ml + pw + 12 << "' y1='" << ly << "' x2='" << ml + pw + 34
            << "' y2='" << ly << "' stroke='" << color << "' stroke-width='2.5'/>\n"
            << "<text x='" << ml + pw + 40 << "' y='" << ly + 4
            << "' font-size='12' font-family='sans-serif'>" << s.name << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace stagger
