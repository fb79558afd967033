//! Worked-example systems shared by unit tests across modules.

use crate::revtag::ReverseTagSystem;
use crate::tag::TagSystem;

pub(crate) const EXAMPLE1_RULES: &str = "tagsystem\nrule a -> a b b\nrule b -> c\nrule c -> a\n";

pub(crate) const EXAMPLE2_SRC: &str = "revtagsystem\n\
    d a 0\n\
    d b 2\n\
    delta a a -> b\n\
    delta a b -> b\n\
    delta b a -> b\n\
    delta b b -> a\n\
    initial b a a a b\n";

/// The periodic instance: same rules as the halting one, initial word `abcb`.
pub(crate) fn example1_left() -> TagSystem {
    TagSystem::parse(&format!("{EXAMPLE1_RULES}initial a b c b\n")).unwrap()
}

/// The halting instance: initial word `abab`, halts after 11 steps.
pub(crate) fn example1_right() -> TagSystem {
    TagSystem::parse(&format!("{EXAMPLE1_RULES}initial a b a b\n")).unwrap()
}

/// The two-symbol reverse tag system that goes periodic after 12 steps.
pub(crate) fn example2() -> ReverseTagSystem {
    ReverseTagSystem::parse(EXAMPLE2_SRC).unwrap()
}

/// A tiny tag system that halts in one step; its translation halts too,
/// which drives the compiled `B` into its halting signal.
pub(crate) fn halting_tag() -> TagSystem {
    TagSystem::parse("tagsystem\nrule a -> b\nrule b -> a\ninitial a b\n").unwrap()
}
