//! Classify the built-in cut catalog and rescale one cut.

use keypoly::cuts::{catalog, CutDescriptor};
use keypoly::ordgroup::{ConvexSubgroup, GroupElement};

fn main() -> keypoly::Result<()> {
    for (name, cut) in catalog() {
        println!("{name:<28} {:<24} vb={}", cut.classify().to_string(), cut.is_vertically_bounded());
    }

    let ball = CutDescriptor::ball_plus(GroupElement::from_ints(&[0, 0]), ConvexSubgroup::new(1, 2));
    let shifted = ball.scale_shift(2, &GroupElement::from_ints(&[0, 1]))?;
    println!("2*({ball}) + (0,1) = {shifted}");
    println!("(0,5) below: {}", shifted.in_lower(&GroupElement::from_ints(&[0, 5])));
    Ok(())
}
