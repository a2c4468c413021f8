#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ggmsel/io.hpp"

using namespace ggmsel;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::io;
}

}  // namespace

TEST(ReadDataCsv, HeaderDetection) {
  std::istringstream with("\xEF\xBB\xBF" "a, b,c\n1,2,3\n\n4,5,6.5\n");
  const auto d = io::read_data_csv(with);
  EXPECT_EQ(d.variable_names(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(d.n(), 2);
  EXPECT_EQ(d.values()(1, 2), 6.5);

  std::istringstream without("1,2\n3,4e-1\n-5,6\n");
  const auto e = io::read_data_csv(without);
  EXPECT_EQ(e.variable_names(), (std::vector<std::string>{"V1", "V2"}));
  EXPECT_EQ(e.n(), 3);
  EXPECT_EQ(e.values()(1, 1), 0.4);
}

TEST(ReadDataCsv, ErrorsNameRowAndColumn) {
  std::istringstream bad("x,y\n1,2\n3,abc\n");
  try {
    io::read_data_csv(bad, "in.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find("row 3, column 2"), std::string::npos) << e.what();
  }
  std::istringstream ragged("1,2\n3\n");
  EXPECT_EQ(kind_of([&] { io::read_data_csv(ragged); }), ErrorKind::parse);
  std::istringstream nonfinite("1,2\n3,inf\n");
  EXPECT_NE(kind_of([&] { io::read_data_csv(nonfinite); }), ErrorKind::io);
  std::istringstream one_row("a,b\n1,2\n");
  EXPECT_EQ(kind_of([&] { io::read_data_csv(one_row); }), ErrorKind::invalid_data);
  EXPECT_EQ(kind_of([] { io::read_data_csv(std::filesystem::path("/nonexistent/x.csv")); }), ErrorKind::io);
}

TEST(WriteAtomic, ReplacesContentsAndLeavesNoTemp) {
  const auto dir = std::filesystem::temp_directory_path() / "ggmsel_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.csv";
  io::write_atomic(path, "first\n");
  io::write_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.csv.tmp"));
  EXPECT_EQ(kind_of([&] { io::write_atomic(dir / "missing" / "x.csv", "x"); }), ErrorKind::io);
  std::filesystem::remove_all(dir);
}

TEST(Formatting, RoundTripsThroughParse) {
  for (double v : {0.0, -1.5, 1e-300, 3.14159265358979, 123456789.0}) {
    const auto s = io::format_real(v);
    EXPECT_NEAR(*io::parse_real(s), v, std::abs(v) * 1e-11);
  }
  EXPECT_EQ(io::format_optional(std::nullopt), "");
  EXPECT_FALSE(io::parse_real("1.0x").has_value());
  EXPECT_FALSE(io::parse_real("").has_value());
}

TEST(EdgesCsv, WritesNamesAndValues) {
  const EdgeSet edges(3, {{0, 2}});
  Matrix k = Matrix::Identity(3, 3);
  k(0, 2) = k(2, 0) = -0.25;
  const SymmetricMatrix km(k);
  EXPECT_EQ(io::edges_csv(edges, {"a", "b", "c"}, &km), "node_i,node_j,precision_value\na,c,-0.25\n");
  EXPECT_EQ(io::edges_csv(edges, {"a", "b", "c"}), "node_i,node_j,precision_value\na,c,\n");
}

TEST(ReadEdgeList, CollapsesAndValidates) {
  const std::vector<std::string> names{"g1", "g2", "g3", "g4"};
  std::istringstream in("node_i,node_j,precision_value\ng1,g2,0.1\ng2,g1,\ng3,g4\ng3,g3\n");
  const auto edges = io::read_edge_list(in, names);
  EXPECT_EQ(edges, EdgeSet(4, {{0, 1}, {2, 3}}));

  std::istringstream missing("g1,zz\nyy,g2\n");
  try {
    io::read_edge_list(missing, names);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unmatched_node);
    EXPECT_NE(std::string(e.what()).find("yy, zz"), std::string::npos) << e.what();
  }
  std::istringstream short_row("g1\n");
  EXPECT_EQ(kind_of([&] { io::read_edge_list(short_row, names); }), ErrorKind::parse);
}
