// tcnfet: command-line front end for the ternary CNFET cell library.
//
// Exit codes: 0 success, 1 parse error, 2 solve error, 3 oracle mismatch,
// 64 usage error.

#include <tcnfet/tcnfet.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

using namespace tcnfet;
using json = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_parse = 1;
constexpr int exit_solve = 2;
constexpr int exit_mismatch = 3;
constexpr int exit_usage = 64;

constexpr int report_version = 1;

struct usage_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct file_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct run_config
{
  double vdd{ default_supply };
  double tolerance{ 0.05 };
  std::size_t iterations{ 100 };
  std::uint64_t seed{ 42 };
  std::string format{ "csv" };
  std::string out;

  solve_config solver() const { return { vdd, iterations, tolerance, true }; }

  json to_json() const { return { { "vdd", vdd }, { "level_tolerance", tolerance }, { "max_iterations", iterations } }; }
};

void add_common( CLI::App* cmd, run_config& rc )
{
  cmd->add_option( "--vdd", rc.vdd, "Supply voltage in V" )->capture_default_str();
  cmd->add_option( "--tolerance", rc.tolerance, "Logic band half-width as a fraction of VDD" )->capture_default_str();
  cmd->add_option( "--iterations", rc.iterations, "Solver iteration limit" )->capture_default_str();
  cmd->add_option( "--format", rc.format, "Output format" )->check( CLI::IsMember( { "csv", "json" } ) )->capture_default_str();
  cmd->add_option( "--out", rc.out, "Write to this file instead of stdout" );
}

void emit( run_config const& rc, std::string const& text )
{
  if ( rc.out.empty() )
  {
    std::cout << text;
    return;
  }
  std::ofstream os( rc.out );
  if ( !os )
    throw file_error( "cannot write '" + rc.out + "'" );
  os << text;
}

std::string read_file( std::string const& path )
{
  std::ifstream is( path );
  if ( !is )
    throw file_error( "cannot read '" + path + "'" );
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

trit parse_trit( std::string const& s, std::string const& what )
{
  if ( s.size() == 1 )
    if ( auto t = trit::from_char( s[0] ) )
      return *t;
  throw usage_error( what + " must be 0, 1 or 2 (got '" + s + "')" );
}

std::string tuple_string( std::vector<trit> const& t )
{
  std::string s;
  for ( auto const v : t )
    s += v.symbol();
  return s;
}

json table_json( truth_table_result const& t )
{
  json rows = json::array();
  for ( auto const& r : t.rows )
  {
    json row;
    for ( std::size_t i = 0; i < r.inputs.size(); ++i )
      row[t.input_names[i]] = std::string( 1, r.inputs[i].symbol() );
    for ( std::size_t i = 0; i < r.outputs.size(); ++i )
      row[t.output_names[i]] = std::string( 1, r.outputs[i].symbol() );
    rows.push_back( row );
  }
  return { { "inputs", t.input_names }, { "outputs", t.output_names }, { "rows", rows } };
}

/* a library cell, optionally with its netlist replaced from a file */
cell_entry resolve_cell( std::string const& name, std::string const& netlist_path )
{
  auto const* c = find_cell( name );
  if ( !c )
    throw usage_error( "unknown cell '" + name + "' (see `tcnfet list`)" );
  cell_entry e = *c;
  if ( !netlist_path.empty() )
  {
    e.net = parse_netlist( read_file( netlist_path ) );
    if ( e.net.find( name ) )
      e.net.top = name;
  }
  return e;
}

int cmd_list()
{
  for ( auto const& c : library() )
    std::cout << c.name << "\t" << c.description << "\n";
  return exit_ok;
}

int cmd_emit( std::string const& which, std::string const& dir )
{
  std::vector<cell_entry const*> cells;
  if ( which == "all" )
    for ( auto const& c : library() )
      cells.push_back( &c );
  else if ( auto const* c = find_cell( which ) )
    cells.push_back( c );
  else
    throw usage_error( "unknown cell '" + which + "'" );

  for ( auto const* c : cells )
  {
    auto const text = "# " + c->description + "\n" + to_text( c->net );
    if ( dir.empty() )
    {
      std::cout << text;
      continue;
    }
    std::filesystem::create_directories( dir );
    auto const path = std::filesystem::path( dir ) / ( c->name + ".net" );
    std::ofstream os( path );
    if ( !os )
      throw file_error( "cannot write '" + path.string() + "'" );
    os << text;
  }
  return exit_ok;
}

int cmd_truth( std::string const& path, std::string const& cell, run_config const& rc )
{
  auto const net = parse_netlist( read_file( path ) );
  auto const flat = elaborate( net, cell );
  auto const table = truth_table( flat, rc.solver() );
  if ( rc.format == "json" )
    emit( rc, json{ { "version", report_version }, { "command", "truth" }, { "cell", flat.name }, { "config", rc.to_json() }, { "table", table_json( table ) } }.dump( 2 ) + "\n" );
  else
    emit( rc, to_csv( table ) );
  return exit_ok;
}

int cmd_check( std::string const& name, std::string const& netlist_path, run_config const& rc )
{
  auto const cell = resolve_cell( name, netlist_path );
  auto const got = cell.simulate( rc.solver() );
  auto const want = cell.expected();

  json mismatches = json::array();
  std::string text;
  for ( std::size_t i = 0; i < got.rows.size(); ++i )
  {
    if ( got.rows[i].outputs == want.rows[i].outputs )
      continue;
    std::string g, w;
    for ( auto const v : got.rows[i].outputs )
      g += v.symbol();
    for ( auto const v : want.rows[i].outputs )
      w += v.symbol();
    auto const label = detail::tuple_label( got.input_names, got.rows[i].inputs );
    text += "mismatch " + label + ": got " + g + ", expected " + w + "\n";
    mismatches.push_back( { { "inputs", tuple_string( got.rows[i].inputs ) }, { "got", g }, { "expected", w } } );
  }
  bool const ok = mismatches.empty();
  if ( rc.format == "json" )
    emit( rc, json{ { "version", report_version },
                    { "command", "check" },
                    { "cell", cell.name },
                    { "config", rc.to_json() },
                    { "rows", got.rows.size() },
                    { "equivalent", ok },
                    { "mismatches", mismatches } }
                      .dump( 2 ) +
                  "\n" );
  else
    emit( rc, text + cell.name + ": " + std::to_string( got.rows.size() ) + " rows, " + std::to_string( mismatches.size() ) + " mismatches\n" );
  return ok ? exit_ok : exit_mismatch;
}

int cmd_vtc( std::string const& name, std::string const& netlist_path, std::string const& pin, std::vector<std::string> const& fixes,
             std::string const& output, std::size_t steps, run_config const& rc )
{
  if ( steps < 2 )
    throw usage_error( "--steps must be at least 2" );
  std::map<std::string, trit> fixed;
  for ( auto const& f : fixes )
  {
    auto const eq = f.find( '=' );
    if ( eq == std::string::npos )
      throw usage_error( "--fix expects NODE=TRIT, got '" + f + "'" );
    fixed[f.substr( 0, eq )] = parse_trit( f.substr( eq + 1 ), "--fix value" );
  }
  auto const cell = resolve_cell( name, netlist_path );
  auto const flat = cell.flatten();
  if ( !flat.find( pin ) )
    throw usage_error( "unknown pin '" + pin + "'" );
  auto const series = vtc_sweep( flat, pin, fixed, steps, rc.solver(), output );
  if ( rc.format == "json" )
  {
    json pts = json::array();
    for ( auto const& p : series )
      pts.push_back( { p.v_in, p.v_out ? json( *p.v_out ) : json( "Z" ) } );
    emit( rc, json{ { "version", report_version }, { "command", "vtc" }, { "cell", cell.name }, { "pin", pin }, { "steps", steps }, { "config", rc.to_json() }, { "series", pts } }.dump( 2 ) + "\n" );
  }
  else
    emit( rc, to_csv( series ) );
  return exit_ok;
}

json mc_json( mc_report const& r, run_config const& rc )
{
  json cells = json::array();
  for ( auto const& c : r.cells )
  {
    json tuples = json::array();
    for ( auto const& t : c.failing_tuples )
      tuples.push_back( tuple_string( t ) );
    cells.push_back( { { "name", c.name }, { "failures", c.failures }, { "failing_tuples", tuples } } );
  }
  auto config = rc.to_json();
  config["seed"] = r.seed;
  config["trials"] = r.trials;
  config["sigma_fraction"] = r.perturbation.sigma_fraction;
  config["truncation"] = r.perturbation.truncation;
  return { { "version", report_version }, { "command", "mc" }, { "config", config }, { "trials", r.trials }, { "failures", r.failures }, { "cells", cells } };
}

int cmd_mc( std::vector<std::string> const& names, std::size_t trials, double sigma, double truncation, run_config const& rc )
{
  if ( trials < 1 )
    throw usage_error( "--trials must be at least 1" );
  if ( !( sigma >= 0.0 ) || !( truncation > 0.0 ) )
    throw usage_error( "--sigma must be >= 0 and --truncation > 0" );
  std::vector<mc_cell> cells;
  for ( auto const& n : names )
  {
    auto const* c = find_cell( n );
    if ( !c )
      throw usage_error( "unknown cell '" + n + "'" );
    cells.push_back( { c->name, c->flatten(), c->oracle, c->options } );
  }
  auto const report = monte_carlo( cells, { sigma, truncation }, trials, rc.seed, rc.solver() );
  if ( rc.format == "json" )
    emit( rc, mc_json( report, rc ).dump( 2 ) + "\n" );
  else
  {
    std::string s = "cell,trials,failures,failing_tuples\n";
    for ( auto const& c : report.cells )
    {
      std::string tuples;
      for ( auto const& t : c.failing_tuples )
        tuples += ( tuples.empty() ? "" : " " ) + tuple_string( t );
      s += c.name + "," + std::to_string( report.trials ) + "," + std::to_string( c.failures ) + "," + tuples + "\n";
    }
    s += "total," + std::to_string( report.trials ) + "," + std::to_string( report.failures ) + ",\n";
    emit( rc, s );
  }
  return exit_ok;
}

int cmd_power( std::string const& name, std::string const& netlist_path, run_config const& rc )
{
  auto const cell = resolve_cell( name, netlist_path );
  auto const flat = cell.flatten();
  auto const table = cell.simulate( rc.solver() );
  bool const split_units = name == "alu2";

  std::string csv;
  for ( auto const& n : table.input_names )
    csv += n + ",";
  csv += "state,static_paths";
  if ( split_units )
    csv += ",logic_unit_paths,arith_unit_paths";
  csv += "\n";

  json rows = json::array();
  std::size_t hz_rows = 0, hz_paths = 0, active_rows = 0, active_paths = 0;
  for ( auto const& row : table.rows )
  {
    std::vector<trit_hz> in( row.inputs.begin(), row.inputs.end() );
    auto const r = solve( flat, in, rc.solver() );
    bool const hz = std::all_of( row.outputs.begin(), row.outputs.end(), []( trit_hz t ) { return t.is_hz(); } );
    ( hz ? hz_rows : active_rows ) += 1;
    ( hz ? hz_paths : active_paths ) += r.static_path_count;

    for ( auto const v : row.inputs )
      csv += std::string( 1, v.symbol() ) + ",";
    csv += std::string( hz ? "hz," : "active," ) + std::to_string( r.static_path_count );
    json jr{ { "inputs", tuple_string( row.inputs ) }, { "state", hz ? "hz" : "active" }, { "static_paths", r.static_path_count } };
    if ( split_units )
    {
      auto const lu = static_paths_through( flat, r, alu2_logic_unit );
      auto const au = static_paths_through( flat, r, alu2_arith_unit );
      csv += "," + std::to_string( lu ) + "," + std::to_string( au );
      jr["logic_unit_paths"] = lu;
      jr["arith_unit_paths"] = au;
    }
    csv += "\n";
    rows.push_back( jr );
  }

  if ( rc.format == "json" )
    emit( rc, json{ { "version", report_version },
                    { "command", "power" },
                    { "cell", cell.name },
                    { "config", rc.to_json() },
                    { "summary", { { "hz_rows", hz_rows }, { "hz_static_paths", hz_paths }, { "active_rows", active_rows }, { "active_static_paths", active_paths } } },
                    { "rows", rows } }
                      .dump( 2 ) +
                  "\n" );
  else
    emit( rc, csv + "# hz rows " + std::to_string( hz_rows ) + ": " + std::to_string( hz_paths ) + " static paths; active rows " +
                  std::to_string( active_rows ) + ": " + std::to_string( active_paths ) + " static paths\n" );
  return exit_ok;
}

int cmd_alu( std::vector<std::string> const& args, std::string const& design, run_config const& rc )
{
  if ( args.size() != 5 )
    throw usage_error( "alu expects: s0 s1 a b cin" );
  std::vector<trit> t;
  char const* names[] = { "s0", "s1", "a", "b", "cin" };
  for ( std::size_t i = 0; i < 5; ++i )
    t.push_back( parse_trit( args[i], names[i] ) );
  if ( t[4].value() == 2 )
    throw usage_error( "cin must be 0 or 1" );

  auto structural = [&]( std::string const& cell ) {
    auto const& c = *find_cell( cell );
    auto const flat = c.flatten();
    detail::table_runner const runner( flat, c.options );
    auto const params = detail::nominal_params( flat );
    return runner.row( t, params, rc.solver() ).outputs;
  };
  auto const b = alu_behavioral( t[0], t[1], t[2], t[3], t[4] );
  std::vector<std::pair<std::string, std::vector<trit_hz>>> results;
  if ( design == "behavioral" || design == "all" )
    results.emplace_back( "behavioral", std::vector<trit_hz>{ b.out, b.carry } );
  if ( design == "1" || design == "all" )
    results.emplace_back( "alu1", structural( "alu1" ) );
  if ( design == "2" || design == "all" )
    results.emplace_back( "alu2", structural( "alu2" ) );

  bool agree = true;
  std::string text;
  json j = json::array();
  for ( auto const& [who, out] : results )
  {
    agree &= out == std::vector<trit_hz>{ b.out, b.carry };
    text += ( results.size() > 1 ? who + ": " : "" ) + std::string( "OUT=" ) + out[0].symbol() + " COUT=" + out[1].symbol() + "\n";
    j.push_back( { { "design", who }, { "out", std::string( 1, out[0].symbol() ) }, { "cout", std::string( 1, out[1].symbol() ) } } );
  }
  if ( rc.format == "json" )
    emit( rc, json{ { "version", report_version }, { "command", "alu" }, { "config", rc.to_json() }, { "inputs", tuple_string( t ) }, { "results", j } }.dump( 2 ) + "\n" );
  else
    emit( rc, text );
  return agree ? exit_ok : exit_mismatch;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Switch-level simulator for tri-state ternary CNFET cells" };
  app.require_subcommand( 1 );
  run_config rc;

  auto* list = app.add_subcommand( "list", "List library cells" );

  std::string emit_which = "all", emit_dir;
  auto* emit_cmd = app.add_subcommand( "emit", "Write library cells in netlist format" );
  emit_cmd->add_option( "cell", emit_which, "Cell name or 'all'" )->capture_default_str();
  emit_cmd->add_option( "--out", emit_dir, "Directory for <cell>.net files (default: stdout)" );

  std::string truth_path, truth_cell;
  auto* truth = app.add_subcommand( "truth", "Exhaustive truth table of a netlist cell" );
  truth->add_option( "netlist", truth_path, "Netlist file" )->required();
  truth->add_option( "--cell", truth_cell, "Cell to simulate (default: the netlist's top cell)" );
  add_common( truth, rc );

  std::string check_cell, check_netlist;
  auto* check = app.add_subcommand( "check", "Compare a library cell against its behavioral model" );
  check->add_option( "cell", check_cell, "Library cell" )->required();
  check->add_option( "--netlist", check_netlist, "Replace the cell's netlist with this file" );
  add_common( check, rc );

  std::string vtc_cell, vtc_netlist, vtc_pin = "IN", vtc_output;
  std::vector<std::string> vtc_fix;
  std::size_t steps = 1000;
  auto* vtc = app.add_subcommand( "vtc", "Voltage transfer characteristic as CSV" );
  vtc->add_option( "cell", vtc_cell, "Library cell" )->required();
  vtc->add_option( "--netlist", vtc_netlist, "Replace the cell's netlist with this file" );
  vtc->add_option( "--pin", vtc_pin, "Swept input" )->capture_default_str();
  vtc->add_option( "--fix", vtc_fix, "Fixed input NODE=TRIT (repeatable)" );
  vtc->add_option( "--output", vtc_output, "Observed output (default: first output)" );
  vtc->add_option( "--steps", steps, "Sweep points" )->capture_default_str();
  add_common( vtc, rc );

  std::vector<std::string> mc_cells = { "buffer_not", "and_nand", "or_nor" };
  std::size_t trials = 1000;
  double sigma = 0.05, truncation = 3.0;
  auto* mc = app.add_subcommand( "mc", "Monte-Carlo tube-diameter variation" );
  mc->add_option( "--cells", mc_cells, "Cells to perturb" )->delimiter( ',' )->capture_default_str();
  mc->add_option( "--trials", trials, "Number of trials" )->capture_default_str();
  mc->add_option( "--sigma", sigma, "Diameter sigma as a fraction of nominal" )->capture_default_str();
  mc->add_option( "--truncation", truncation, "Truncation in multiples of sigma" )->capture_default_str();
  mc->add_option( "--seed", rc.seed, "Random seed" )->capture_default_str();
  add_common( mc, rc );

  std::string power_cell, power_netlist;
  auto* power = app.add_subcommand( "power", "Static VDD-to-GND path count per input state" );
  power->add_option( "cell", power_cell, "Library cell" )->required();
  power->add_option( "--netlist", power_netlist, "Replace the cell's netlist with this file" );
  add_common( power, rc );

  std::vector<std::string> alu_args;
  std::string design = "behavioral";
  auto* alu = app.add_subcommand( "alu", "Evaluate one ALU operation" );
  alu->add_option( "operands", alu_args, "s0 s1 a b cin" )->expected( 5 )->required();
  alu->add_option( "--design", design, "1, 2, behavioral or all" )->check( CLI::IsMember( { "1", "2", "behavioral", "all" } ) )->capture_default_str();
  add_common( alu, rc );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::CallForHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::CallForAllHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::ParseError const& e )
  {
    app.exit( e );
    return exit_usage;
  }

  try
  {
    if ( *list )
      return cmd_list();
    if ( *emit_cmd )
      return cmd_emit( emit_which, emit_dir );
    if ( *truth )
      return cmd_truth( truth_path, truth_cell, rc );
    if ( *check )
      return cmd_check( check_cell, check_netlist, rc );
    if ( *vtc )
      return cmd_vtc( vtc_cell, vtc_netlist, vtc_pin, vtc_fix, vtc_output, steps, rc );
    if ( *mc )
      return cmd_mc( mc_cells, trials, sigma, truncation, rc );
    if ( *power )
      return cmd_power( power_cell, power_netlist, rc );
    if ( *alu )
      return cmd_alu( alu_args, design, rc );
  }
  catch ( usage_error const& e )
  {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  }
  catch ( file_error const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  }
  catch ( parse_error const& e )
  {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_parse;
  }
  catch ( elaboration_error const& e )
  {
    std::cerr << "elaboration error: " << e.what() << "\n";
    return exit_parse;
  }
  catch ( solve_error const& e )
  {
    std::cerr << "solve error: " << e.what() << "\n";
    return exit_solve;
  }
  catch ( std::invalid_argument const& e )
  {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
