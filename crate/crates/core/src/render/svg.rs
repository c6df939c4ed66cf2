use super::SvgDocument;

/// Three decimals, with negative zero printed as `0.000`.
pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_owned()
    } else {
        s
    }
}

/// Rounds to the three decimals [`num`] prints.
pub(crate) fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

pub(crate) type Attrs<'a> = &'a [(&'a str, String)];

/// Append-only SVG emitter. Attributes are written exactly in the order
/// given, children are indented two spaces per level.
pub(crate) struct SvgWriter {
    out: String,
    depth: usize,
}

impl SvgWriter {
    pub fn new(width: u32, height: u32) -> Self {
        let mut w = SvgWriter {
            out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
            depth: 0,
        };
        w.open(
            "svg",
            &[
                ("xmlns", "http://www.w3.org/2000/svg".into()),
                ("version", "1.1".into()),
                ("width", width.to_string()),
                ("height", height.to_string()),
                ("viewBox", format!("0 0 {width} {height}")),
                ("font-family", "sans-serif".into()),
                ("font-size", "12".into()),
            ],
        );
        w.leaf(
            "rect",
            &[
                ("x", "0".into()),
                ("y", "0".into()),
                ("width", width.to_string()),
                ("height", height.to_string()),
                ("fill", "#ffffff".into()),
            ],
        );
        w
    }

    fn start(&mut self, name: &str, attrs: Attrs) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            self.out.push_str(&escape(v));
            self.out.push('"');
        }
    }

    pub fn open(&mut self, name: &str, attrs: Attrs) {
        self.start(name, attrs);
        self.out.push_str(">\n");
        self.depth += 1;
    }

    pub fn close(&mut self, name: &str) {
        self.depth -= 1;
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    pub fn leaf(&mut self, name: &str, attrs: Attrs) {
        self.start(name, attrs);
        self.out.push_str("/>\n");
    }

    pub fn text(&mut self, attrs: Attrs, content: &str) {
        self.start("text", attrs);
        self.out.push('>');
        self.out.push_str(&escape(content));
        self.out.push_str("</text>\n");
    }

    /// Text followed by a secondary run in another colour.
    pub fn text_with_note(&mut self, attrs: Attrs, content: &str, note: &str, note_fill: &str) {
        self.start("text", attrs);
        self.out.push('>');
        self.out.push_str(&escape(content));
        self.out.push_str("<tspan fill=\"");
        self.out.push_str(&escape(note_fill));
        self.out.push_str("\">");
        self.out.push_str(&escape(note));
        self.out.push_str("</tspan></text>\n");
    }

    pub fn finish(mut self) -> SvgDocument {
        self.close("svg");
        debug_assert_eq!(self.depth, 0);
        SvgDocument(self.out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_three_decimals() {
        assert_eq!(num(1.0), "1.000");
        assert_eq!(num(-0.0001), "0.000");
        assert_eq!(num(2.0 / 3.0), "0.667");
        assert_eq!(num(-12.3456), "-12.346");
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\"'"), "a&lt;b &amp; &quot;c&quot;&apos;");
    }

    #[test]
    fn attribute_order_is_preserved() {
        let mut w = SvgWriter::new(10, 10);
        w.leaf("circle", &[("r", "1".into()), ("cx", "2".into()), ("cy", "3".into())]);
        let doc = w.finish();
        assert!(doc.as_str().contains("<circle r=\"1\" cx=\"2\" cy=\"3\"/>"));
        assert!(doc.as_str().ends_with("</svg>\n"));
    }
}
