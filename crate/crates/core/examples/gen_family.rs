//! Prints one program of each synthetic family, with and without a
//! planted bug.

use partrace::bench::{gen_family, Family};

fn main() {
    for family in [Family::Branches, Family::Loops, Family::Mixed] {
        for bug in [false, true] {
            println!("// {family}, 2 blocks{}", if bug { ", with bug" } else { "" });
            println!("{}", gen_family(family, 2, 7, bug));
        }
    }
}
