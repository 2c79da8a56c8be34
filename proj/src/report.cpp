#include "defectscan/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace defectscan {

namespace {

std::string hexd(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

void append_config_echo(std::ostringstream& out, const ExperimentSpec& spec) {
    std::istringstream echo(echo_config(spec));
    std::string line;
    while (std::getline(echo, line)) out << "config." << line << '\n';
}

void write_text(const std::string& path, const std::string& header,
                const std::string& payload) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("report: cannot open " + path);
    out << header << payload;
    if (!out) throw std::runtime_error("report: write failed for " + path);
}

} // namespace

std::string inversion_report_payload(const ExperimentSpec& spec,
                                     const InversionResult& result) {
    std::ostringstream out;
    out << "report inversion 1\n";
    append_config_echo(out, spec);
    out << "result.j_hat " << result.j_hat << '\n';
    out << "result.k_hat " << hexd(result.k_hat) << '\n';
    out << "result.residual_log10 " << hexd(result.residual) << '\n';
    out << "result.evaluations " << result.evaluations << '\n';
    out << "result.tie " << (result.tie ? 1 : 0) << '\n';
    out << "per_index " << result.per_index_residual.size() << '\n';
    for (std::size_t i = 0; i < result.per_index_residual.size(); ++i)
        out << (i + 2) << ' ' << hexd(result.per_index_residual[i]) << ' '
            << hexd(result.per_index_k[i]) << '\n';
    return out.str();
}

std::string mc_report_payload(const ExperimentSpec& spec, const McInversion& mc) {
    std::ostringstream out;
    out << "report mc-inversion 1\n";
    append_config_echo(out, spec);
    out << "result.median_j " << hexd(mc.median_j) << '\n';
    out << "result.median_k " << hexd(mc.median_k) << '\n';
    out << "result.n_runs " << mc.n_runs << '\n';
    out << "result.n_failed " << mc.n_failed << '\n';
    out << "runs " << mc.runs.size() << '\n';
    for (std::size_t i = 0; i < mc.runs.size(); ++i) {
        const InversionResult& r = mc.runs[i];
        out << i << ' ' << r.j_hat << ' ' << hexd(r.k_hat) << ' ' << hexd(r.residual)
            << '\n';
    }
    return out.str();
}

void write_inversion_report(const std::string& path, const ExperimentSpec& spec,
                            const InversionResult& result) {
    std::ostringstream header;
    header << "# defectscan inversion report\n";
    header << "# wall_time_s " << result.wall_time_s << '\n';
    write_text(path, header.str(), inversion_report_payload(spec, result));
}

void write_mc_report(const std::string& path, const ExperimentSpec& spec,
                     const McInversion& mc) {
    double total_wall = 0.0;
    for (const auto& r : mc.runs) total_wall += r.wall_time_s;
    std::ostringstream header;
    header << "# defectscan mc report\n";
    header << "# total_run_wall_time_s " << total_wall << '\n';
    write_text(path, header.str(), mc_report_payload(spec, mc));
}

void write_per_index_csv(const std::string& path, const InversionResult& result) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("report: cannot open " + path);
    std::fprintf(f, "j,residual_log10,k_best\n");
    for (std::size_t i = 0; i < result.per_index_residual.size(); ++i)
        std::fprintf(f, "%zu,%.17g,%.17g\n", i + 2, result.per_index_residual[i],
                     result.per_index_k[i]);
    std::fclose(f);
}

void write_mc_runs_csv(const std::string& path, const McInversion& mc) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("report: cannot open " + path);
    std::fprintf(f, "run,j_hat,k_hat,residual_log10\n");
    for (std::size_t i = 0; i < mc.runs.size(); ++i)
        std::fprintf(f, "%zu,%d,%.17g,%.17g\n", i, mc.runs[i].j_hat, mc.runs[i].k_hat,
                     mc.runs[i].residual);
    std::fclose(f);
}

void write_landscape_csv(const std::string& path, const Landscape& ls) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("report: cannot open " + path);
    std::fprintf(f, "j\\k");
    for (double k : ls.k_values) std::fprintf(f, ",%.17g", k);
    std::fprintf(f, "\n");
    for (std::size_t a = 0; a < ls.j_values.size(); ++a) {
        std::fprintf(f, "%d", ls.j_values[a]);
        for (double v : ls.residual[a]) std::fprintf(f, ",%.17g", v);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

std::string read_report_payload(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("report: cannot open " + path);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        out << line << '\n';
    }
    return out.str();
}

} // namespace defectscan
