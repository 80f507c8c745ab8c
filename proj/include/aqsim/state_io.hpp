#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "aqsim/format.hpp"
#include "aqsim/state.hpp"

// State snapshot text format:
//   AQSIM-STATE v1
//   [grid <n> <spacing> <origin> <periodic|hard-wall>]
//   <label> <re> <im>
// Labels are decimal; bit-string labels (e.g. 0b101) are accepted on load.
// Histograms are CSV with header `label,count,frequency`.

namespace aqsim {

inline std::string snapshot_to_string(const grained_wavefunction& psi,
                                      const std::string& boundary = "") {
    std::string out = "AQSIM-STATE v1\n";
    if (psi.basis_meta) {
        out += "grid " + format_u64(psi.basis_meta->n_points) + " " +
               format_double(psi.basis_meta->spacing) + " " +
               format_double(psi.basis_meta->origin) + " " +
               (boundary.empty() ? "periodic" : boundary) + "\n";
    }
    for (const auto& [l, a] : psi.entries)
        out += format_u64(l) + " " + format_double(a.real()) + " " +
               format_double(a.imag()) + "\n";
    return out;
}

inline label_t parse_label(const std::string& tok) {
    if (tok.size() > 2 && tok[0] == '0' && tok[1] == 'b')
        return std::stoull(tok.substr(2), nullptr, 2);
    bool binary_like = tok.size() > 1;
    for (char c : tok)
        if (c != '0' && c != '1') { binary_like = false; break; }
    // Plain bit-strings (leading zeros) read as binary; decimals otherwise.
    if (binary_like && tok[0] == '0') return std::stoull(tok, nullptr, 2);
    return std::stoull(tok);
}

inline grained_wavefunction snapshot_from_string(const std::string& text,
                                                 grain_policy grain = grain_policy{}) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "AQSIM-STATE v1")
        throw parse_error("snapshot: missing AQSIM-STATE v1 header");
    grained_wavefunction psi;
    psi.grain = grain;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string first;
        ls >> first;
        if (first == "grid") {
            grid_meta meta;
            std::string boundary;
            ls >> meta.n_points >> meta.spacing >> meta.origin >> boundary;
            if (!ls) throw parse_error("snapshot: malformed grid line");
            psi.basis_meta = meta;
            continue;
        }
        double re = 0.0, im = 0.0;
        ls >> re >> im;
        if (!ls) throw parse_error("snapshot: malformed entry line: " + line);
        psi.entries.emplace_back(parse_label(first), cplx{re, im});
    }
    psi.sort_entries();
    return psi;
}

inline void save_snapshot(const std::string& path, const grained_wavefunction& psi,
                          const std::string& boundary = "") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("save_snapshot: cannot open " + path);
    out << snapshot_to_string(psi, boundary);
}

inline grained_wavefunction load_snapshot(const std::string& path,
                                          grain_policy grain = grain_policy{}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("load_snapshot: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return snapshot_from_string(ss.str(), grain);
}

inline std::string histogram_to_csv(const histogram& h) {
    std::string out = "label,count,frequency\n";
    for (std::size_t i = 0; i < h.labels.size(); ++i)
        out += format_u64(h.labels[i]) + "," + format_u64(h.counts[i]) + "," +
               format_double(h.frequency(i)) + "\n";
    return out;
}

} // namespace aqsim
