//! Bundled vocabularies for filler text and entity surfaces.

pub const FILLER: &[&str] = &[
    "about", "above", "account", "across", "after", "again", "against", "agent", "almost", "along", "already", "among",
    "answer", "archive", "around", "asked", "back", "balance", "became", "before", "behind", "below", "between",
    "beyond", "board", "body", "border", "both", "branch", "bring", "buyer", "called", "came", "carried", "case",
    "channel", "check", "city", "clear", "client", "close", "code", "common", "company", "contact", "could", "country",
    "course", "dark", "data", "deal", "delivery", "detail", "during", "early", "east", "either", "else", "enough",
    "even", "every", "field", "file", "final", "first", "found", "friend", "from", "further", "given", "good", "group",
    "half", "hand", "having", "heard", "held", "here", "himself", "hold", "house", "however", "inside", "into", "item",
    "just", "kept", "kind", "known", "large", "last", "later", "least", "left", "less", "letter", "light", "line",
    "list", "little", "local", "long", "made", "market", "matter", "meeting", "message", "might", "money", "month",
    "more", "most", "moved", "much", "near", "never", "next", "night", "north", "note", "number", "offer", "often",
    "once", "only", "open", "order", "other", "over", "owner", "package", "paid", "part", "payment", "people",
    "perhaps", "place", "point", "price", "public", "quite", "rather", "ready", "receipt", "record", "report",
    "request", "rest", "return", "road", "round", "said", "same", "seen", "seller", "sent", "service", "several",
    "shall", "short", "should", "side", "since", "small", "some", "soon", "south", "still", "store", "such", "sure",
    "system", "taken", "than", "that", "their", "then", "there", "these", "thing", "those", "though", "through",
    "time", "today", "together", "told", "toward", "transfer", "under", "until", "upon", "used", "usual", "very",
    "wallet", "week", "well", "went", "were", "west", "what", "when", "where", "which", "while", "whole", "will",
    "with", "within", "without", "word", "work", "would", "year", "young",
];

pub const FIRST_NAMES: &[&str] = &[
    "Alba",
    "Alejandro",
    "Ana",
    "Andrea",
    "Antonio",
    "Carlos",
    "Carmen",
    "Clara",
    "Daniel",
    "David",
    "Diego",
    "Elena",
    "Javier",
    "Jorge",
    "Jose",
    "Juan",
    "Laura",
    "Lucia",
    "Luis",
    "Manuel",
    "Maria",
    "Marta",
    "Miguel",
    "Pablo",
    "Paula",
    "Pedro",
    "Raquel",
    "Sara",
    "Sergio",
    "Sofia",
];

pub const LAST_NAMES: &[&str] = &[
    "Alonso",
    "Blanco",
    "Castro",
    "Diaz",
    "Fernandez",
    "Garcia",
    "Gomez",
    "Gonzalez",
    "Hernandez",
    "Jimenez",
    "Lopez",
    "Martin",
    "Martinez",
    "Moreno",
    "Munoz",
    "Navarro",
    "Ortega",
    "Perez",
    "Ramirez",
    "Ramos",
    "Romero",
    "Rubio",
    "Ruiz",
    "Sanchez",
    "Sanz",
    "Serrano",
    "Torres",
    "Vazquez",
];

pub const DOMAINS: &[&str] = &[
    "example.com",
    "example.org",
    "example.net",
    "mail.test",
    "inbox.test",
    "post.invalid",
];

pub const STREET_NAMES: &[&str] = &[
    "Acacia", "Birch", "Cedar", "Chestnut", "Elm", "Harbor", "Hill", "Lake", "Maple", "Meadow", "Mill", "Oak", "Park",
    "Pine", "River", "Spring", "Sunset", "Valley", "Walnut", "Willow",
];

pub const STREET_KINDS: &[&str] = &["Avenue", "Lane", "Road", "Street", "Way"];
