// Parse a hand-written netlist, check it statically and compare it with a model.

#include <tcnfet/tcnfet.hpp>

#include <iostream>

namespace
{

/* a standard ternary inverter driving a positive one: PTI(STI(a)) */
char const* const source = R"(
.supply 0.9
.subckt sti IN OUT
M1 OUT IN VDD P (19,0)
M2 OUT IN GND N (19,0)
.ends
.subckt pti IN OUT
M1 OUT IN VDD P (19,0)
M2 OUT IN GND N (10,0)
.ends
.subckt chain A Y
X1 sti A MID
X2 pti MID Y
.ends
)";

} // namespace

int main()
{
  using namespace tcnfet;

  auto const flat = elaborate( parse_netlist( source ) );
  for ( auto const& d : validate( flat ) )
    std::cout << "warning: " << d.message << "\n";

  auto const table = truth_table( flat );
  bool ok = true;
  for ( auto const& row : table.rows )
  {
    auto const want = pti( sti( row.inputs[0] ) );
    std::cout << "A=" << row.inputs[0].symbol() << " Y=" << row.outputs[0].symbol() << " (model " << want.symbol() << ")\n";
    ok &= row.outputs[0] == trit_hz{ want };
  }
  std::cout << ( ok ? "matches" : "differs" ) << "\n";
  return ok ? 0 : 1;
}
