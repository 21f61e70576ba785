// Copyright 2026 The l0dl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "l0dl/lp_export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace l0dl {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Emits expressions token by token, folding lines at a fixed width so the
// output stays readable and byte-deterministic.
class LineWriter {
 public:
  explicit LineWriter(std::ostringstream& out) : out_(out) {}

  void begin(const std::string& head) {
    out_ << head;
    column_ = head.size();
  }

  void token(const std::string& tok) {
    if (column_ + tok.size() + 1 > 100) {
      out_ << "\n   ";
      column_ = 3;
    }
    out_ << ' ' << tok;
    column_ += tok.size() + 1;
  }

  void end() { out_ << '\n'; }

 private:
  std::ostringstream& out_;
  std::size_t column_ = 0;
};

void signed_term(LineWriter& w, bool& first, double coef, const std::string& rest) {
  if (coef == 0.0) return;
  const bool negative = coef < 0.0;
  if (first) {
    if (negative) w.token("-");
    first = false;
  } else {
    w.token(negative ? "-" : "+");
  }
  w.token(fmt(std::abs(coef)));
  w.token(rest);
}

}  // namespace

std::string export_lp(const MiqpProblem& problem, bool with_tightening) {
  const Matrix& d = problem.dict().atoms();
  const Index p = problem.dict().atom_count();
  const double m = problem.big_m();
  const Matrix gram = d.transpose() * d;
  const Vector lin = d.transpose() * problem.y();
  const double constant = 0.5 * problem.y().squaredNorm();

  std::ostringstream out;
  LineWriter w(out);
  out << "\\ l0 sparse coding instance: p=" << p << " T=" << problem.budget()
      << " M=" << fmt(m) << (with_tightening ? " tightened" : "") << "\n";
  out << "\\ objective constant 0.5*y'y = " << fmt(constant)
      << " (add to the LP optimum)\n";

  out << "Minimize\n";
  w.begin(" obj:");
  bool first = true;
  for (Index i = 0; i < p; ++i) {
    signed_term(w, first, -lin[i], "x" + std::to_string(i));
  }
  if (first) {
    w.token("0");
    w.token("x0");
    first = false;
  }
  w.token("+");
  w.token("[");
  bool q_first = true;
  for (Index i = 0; i < p; ++i) {
    signed_term(w, q_first, gram(i, i), "x" + std::to_string(i) + " ^2");
    for (Index j = i + 1; j < p; ++j) {
      signed_term(w, q_first, 2.0 * gram(i, j),
                  "x" + std::to_string(i) + " * x" + std::to_string(j));
    }
  }
  if (q_first) {
    w.token("0");
    w.token("x0 ^2");
  }
  w.token("]");
  w.token("/");
  w.token("2");
  w.end();

  out << "Subject To\n";
  for (Index i = 0; i < p; ++i) {
    out << " mneg" << i << ": x" << i << " + " << fmt(m) << " z" << i << " >= 0\n";
    out << " mpos" << i << ": x" << i << " - " << fmt(m) << " z" << i << " <= 0\n";
  }
  w.begin(" card:");
  for (Index i = 0; i < p; ++i) {
    if (i > 0) w.token("+");
    w.token("z" + std::to_string(i));
  }
  w.token("<=");
  w.token(fmt(problem.budget()));
  w.end();
  if (with_tightening) {
    for (Index i = 0; i < p; ++i) {
      out << " absp" << i << ": u" << i << " - x" << i << " >= 0\n";
      out << " absn" << i << ": u" << i << " + x" << i << " >= 0\n";
    }
    w.begin(" l1:");
    for (Index i = 0; i < p; ++i) {
      if (i > 0) w.token("+");
      w.token("u" + std::to_string(i));
    }
    w.token("<=");
    w.token(fmt(static_cast<double>(problem.budget()) * m));
    w.end();
  }

  out << "Bounds\n";
  for (Index i = 0; i < p; ++i) {
    if (with_tightening) {
      out << " -" << fmt(m) << " <= x" << i << " <= " << fmt(m) << "\n";
    } else {
      out << " x" << i << " free\n";
    }
  }
  if (with_tightening) {
    for (Index i = 0; i < p; ++i) {
      out << " u" << i << " <= " << fmt(m) << "\n";
    }
  }

  out << "Binaries\n";
  w.begin("");
  for (Index i = 0; i < p; ++i) {
    w.token("z" + std::to_string(i));
  }
  w.end();
  out << "End\n";
  return out.str();
}

void export_lp_file(const MiqpProblem& problem, bool with_tightening,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("export_lp_file: cannot open " + path);
  }
  out << export_lp(problem, with_tightening);
  if (!out) {
    throw std::runtime_error("export_lp_file: write failed for " + path);
  }
}

}  // namespace l0dl
