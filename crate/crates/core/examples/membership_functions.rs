// Tabulate the six membership shapes over the unit band.

use fknn::fuzzy::{membership, MembershipKind, MembershipSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{:>5}", "t");
    for kind in MembershipKind::ALL {
        print!("{:>8}", kind.tag());
    }
    println!();
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        print!("{t:>5.1}");
        for kind in MembershipKind::ALL {
            print!("{:>8.3}", membership(&MembershipSpec::new(kind), t));
        }
        println!();
    }
    Ok(())
}
