//! Closed object-category and affordance vocabularies, with the per-category
//! pairing counts of the PIAD-C and LASO-C benchmarks.

/// One row of a benchmark statistics table.
#[derive(Clone, Copy, Debug)]
pub struct CategoryStat {
    pub category: &'static str,
    pub affordances: &'static [&'static str],
    pub pairings: usize,
}

const fn row(
    category: &'static str,
    affordances: &'static [&'static str],
    pairings: usize,
) -> CategoryStat {
    CategoryStat {
        category,
        affordances,
        pairings,
    }
}

pub const OBJECT_CATEGORIES: [&str; 23] = [
    "Bag",
    "Bed",
    "Bottle",
    "Bowl",
    "Chair",
    "Clock",
    "Dishwasher",
    "Display",
    "Door",
    "Earphone",
    "Faucet",
    "Hat",
    "Keyboard",
    "Knife",
    "Laptop",
    "Microwave",
    "Mug",
    "Refrigerator",
    "Scissors",
    "StorageFurniture",
    "Table",
    "TrashCan",
    "Vase",
];

/// Affordance names. The statistics tables use 17 types for PIAD-C; LASO-C
/// additionally lists `pull` for doors, so the accepted vocabulary has 18.
pub const AFFORDANCE_TYPES: [&str; 18] = [
    "contain",
    "cut",
    "display",
    "grasp",
    "lay",
    "lift",
    "listen",
    "move",
    "open",
    "pour",
    "press",
    "pull",
    "push",
    "sit",
    "stab",
    "support",
    "wear",
    "wrap_grasp",
];

pub const PIAD_C_STATS: [CategoryStat; 23] = [
    row("Earphone", &["listen", "grasp"], 70),
    row("Bag", &["contain", "open", "grasp", "lift"], 50),
    row("Chair", &["move", "support", "sit"], 587),
    row("Refrigerator", &["contain", "open"], 53),
    row("Knife", &["stab", "cut", "grasp"], 138),
    row("Dishwasher", &["contain", "open"], 39),
    row("Keyboard", &["press"], 25),
    row("Scissors", &["stab", "cut", "grasp"], 29),
    row("Table", &["move", "support"], 194),
    row("StorageFurniture", &["contain", "open"], 92),
    row("Bottle", &["contain", "wrap_grasp", "open", "grasp", "pour"], 273),
    row("Bowl", &["contain", "wrap_grasp", "pour"], 83),
    row("Microwave", &["contain", "open"], 47),
    row("Display", &["display"], 52),
    row("TrashCan", &["contain", "open", "pour"], 69),
    row("Hat", &["wear", "grasp"], 66),
    row("Clock", &["display"], 9),
    row("Door", &["open", "push"], 47),
    row("Mug", &["contain", "wrap_grasp", "grasp", "pour"], 126),
    row("Faucet", &["open", "grasp"], 95),
    row("Vase", &["contain", "wrap_grasp", "pour"], 134),
    row("Laptop", &["press", "display"], 112),
    row("Bed", &["lay", "support", "sit"], 84),
];

pub const LASO_C_STATS: [CategoryStat; 23] = [
    row("Door", &["open", "push", "pull"], 35),
    row("Clock", &["display"], 34),
    row("Dishwasher", &["open", "contain"], 20),
    row("Earphone", &["listen", "grasp"], 28),
    row("Vase", &["contain", "pour", "wrap_grasp"], 167),
    row("Knife", &["stab", "grasp", "cut"], 59),
    row("Bowl", &["contain", "pour", "wrap_grasp"], 36),
    row("Bag", &["open", "contain", "lift", "grasp"], 25),
    row("Faucet", &["open", "grasp"], 80),
    row("Scissors", &["stab", "grasp", "cut"], 11),
    row("Display", &["display"], 58),
    row("Chair", &["sit", "support", "move"], 858),
    row("Bottle", &["grasp", "wrap_grasp", "open", "contain", "pour"], 122),
    row("Microwave", &["open", "contain"], 23),
    row("StorageFurniture", &["open", "contain"], 183),
    row("Refrigerator", &["open", "contain"], 23),
    row("Mug", &["contain", "grasp", "pour", "wrap_grasp"], 45),
    row("Keyboard", &["press"], 10),
    row("Table", &["support", "move"], 431),
    row("Bed", &["sit", "support", "lay"], 36),
    row("Hat", &["wear", "grasp"], 26),
    row("Laptop", &["display", "press"], 55),
    row("TrashCan", &["open", "contain", "pour"], 51),
];

pub const PIAD_C_TOTAL: usize = 2474;
pub const LASO_C_TOTAL: usize = 2416;

/// Canonical spelling of a category, matched case-insensitively.
pub fn canonical_category(name: &str) -> Option<&'static str> {
    OBJECT_CATEGORIES
        .iter()
        .copied()
        .find(|c| c.eq_ignore_ascii_case(name.trim()))
}

/// Canonical spelling of an affordance. `wrap-grasp` and `wrap_grasp` both
/// map to `wrap_grasp`.
pub fn canonical_affordance(name: &str) -> Option<&'static str> {
    let normalized = name.trim().replace('-', "_");
    AFFORDANCE_TYPES
        .iter()
        .copied()
        .find(|a| a.eq_ignore_ascii_case(&normalized))
}

pub fn total_pairings(stats: &[CategoryStat]) -> usize {
    stats.iter().map(|s| s.pairings).sum()
}
