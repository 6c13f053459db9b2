//! Compares two groupings of the same nodes by the Salton index of their
//! best matching groups.

use std::io::Cursor;

use linkcomm::io::read_groups;
use linkcomm::report::write_matches;

const FOUND: &str = "node\tcommunity\tgrade
a\tc1\t1.0
b\tc1\t1.0
c\tc1\t0.75
c\tc2\t0.25
d\tc2\t1.0
e\tc2\t1.0
f\tc2\t0.6
";

const REFERENCE: &str = "node\tcluster
a\tx
b\tx
c\tx
d\ty
e\ty
f\tz
";

fn main() {
    let found: Vec<_> = read_groups(Cursor::new(FOUND), 0.5).unwrap().into_iter().collect();
    let reference: Vec<_> = read_groups(Cursor::new(REFERENCE), 0.5).unwrap().into_iter().collect();
    let mut out = Vec::new();
    let rows = write_matches(&mut out, &found, &reference).unwrap();
    print!("{}", String::from_utf8(out).unwrap());
    let mean = rows.iter().map(|r| r.salton).sum::<f64>() / rows.len() as f64;
    println!("mean salton {mean:.3}");
}
