//! Static SVG chart generation: bar charts, pies, and grouped section bars.
//! Geometry is computed directly from the aggregate values with fixed-width
//! number formatting, so identical inputs produce identical bytes.

use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#eeca3b", "#b279a2", "#9d755d",
];

pub struct SvgDoc {
    body: String,
    width: u32,
    cursor_y: u32,
}

impl SvgDoc {
    pub fn new() -> SvgDoc {
        SvgDoc {
            body: String::new(),
            width: 760,
            cursor_y: 20,
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
             font-family=\"monospace\" font-size=\"12\">\n{}</svg>\n",
            self.width,
            self.cursor_y + 20,
            self.body
        )
    }

    fn title(&mut self, text: &str) {
        writeln!(
            self.body,
            r#"<text x="20" y="{}" font-size="14" font-weight="bold">{}</text>"#,
            self.cursor_y + 14,
            escape(text)
        )
        .unwrap();
        self.cursor_y += 24;
    }

    /// Horizontal bars scaled to the largest value.
    pub fn bar_chart(&mut self, title: &str, rows: &[(String, f64, String)]) {
        self.title(title);
        let max = rows.iter().map(|(_, v, _)| *v).fold(0.0f64, f64::max);
        let scale = if max > 0.0 { 420.0 / max } else { 0.0 };
        for (i, (label, value, annotation)) in rows.iter().enumerate() {
            let y = self.cursor_y;
            let w = (value * scale).max(0.0);
            writeln!(
                self.body,
                r#"<text x="20" y="{ty}" text-anchor="start">{label}</text><rect x="130" y="{ry}" width="{w:.2}" height="14" fill="{fill}"/><text x="{vx:.2}" y="{ty}">{ann}</text>"#,
                ty = y + 12,
                ry = y + 2,
                w = w,
                fill = PALETTE[i % PALETTE.len()],
                vx = 136.0 + w,
                label = escape(label),
                ann = escape(annotation),
            )
            .unwrap();
            self.cursor_y += 20;
        }
        self.cursor_y += 12;
    }

    /// Pie of proportions (values should sum to about one).
    pub fn pie_chart(&mut self, title: &str, rows: &[(String, f64)]) {
        self.title(title);
        let cx = 130.0;
        let cy = self.cursor_y as f64 + 100.0;
        let r = 90.0;
        let mut angle = -std::f64::consts::FRAC_PI_2;
        for (i, (label, share)) in rows.iter().enumerate() {
            let sweep = share * std::f64::consts::TAU;
            let (x0, y0) = (cx + r * angle.cos(), cy + r * angle.sin());
            let end = angle + sweep;
            let (x1, y1) = (cx + r * end.cos(), cy + r * end.sin());
            let large = if sweep > std::f64::consts::PI { 1 } else { 0 };
            if *share > 0.0 {
                writeln!(
                    self.body,
                    r#"<path d="M{cx:.2} {cy:.2} L{x0:.2} {y0:.2} A{r:.2} {r:.2} 0 {large} 1 {x1:.2} {y1:.2} Z" fill="{fill}" stroke="white"/>"#,
                    fill = PALETTE[i % PALETTE.len()],
                )
                .unwrap();
            }
            let ly = self.cursor_y as f64 + 20.0 + i as f64 * 18.0;
            writeln!(
                self.body,
                r#"<rect x="280" y="{ry:.2}" width="12" height="12" fill="{fill}"/><text x="298" y="{ty:.2}">{label} {pct:.1}%</text>"#,
                ry = ly - 10.0,
                ty = ly,
                fill = PALETTE[i % PALETTE.len()],
                label = escape(label),
                pct = share * 100.0,
            )
            .unwrap();
            angle = end;
        }
        self.cursor_y += 210;
    }

    /// One group of bars per row, one bar per series entry.
    pub fn grouped_bars(&mut self, title: &str, series: &[&str], rows: &[(String, Vec<f64>)]) {
        self.title(title);
        let max = rows
            .iter()
            .flat_map(|(_, vs)| vs.iter().copied())
            .fold(0.0f64, f64::max);
        let scale = if max > 0.0 { 360.0 / max } else { 0.0 };
        for (si, name) in series.iter().enumerate() {
            let lx = 130 + si as u32 * 90;
            writeln!(
                self.body,
                r#"<rect x="{lx}" y="{ry}" width="12" height="12" fill="{fill}"/><text x="{tx}" y="{ty}">{name}</text>"#,
                ry = self.cursor_y,
                tx = lx + 16,
                ty = self.cursor_y + 11,
                fill = PALETTE[si % PALETTE.len()],
                name = escape(name),
            )
            .unwrap();
        }
        self.cursor_y += 22;
        let bar = 10u32;
        for (label, values) in rows {
            writeln!(
                self.body,
                r#"<text x="20" y="{ty}">{label}</text>"#,
                ty = self.cursor_y + 12,
                label = escape(label),
            )
            .unwrap();
            for (si, v) in values.iter().enumerate() {
                writeln!(
                    self.body,
                    r#"<rect x="130" y="{ry}" width="{w:.2}" height="{bar}" fill="{fill}"/>"#,
                    ry = self.cursor_y + si as u32 * (bar + 1),
                    w = (v * scale).max(0.0),
                    fill = PALETTE[si % PALETTE.len()],
                )
                .unwrap();
            }
            self.cursor_y += values.len() as u32 * (bar + 1) + 8;
        }
        self.cursor_y += 12;
    }

    /// A plain text block (used for succession chains).
    pub fn text_block(&mut self, title: &str, lines: &[String]) {
        self.title(title);
        for line in lines {
            writeln!(
                self.body,
                r#"<text x="20" y="{ty}">{line}</text>"#,
                ty = self.cursor_y + 12,
                line = escape(line),
            )
            .unwrap();
            self.cursor_y += 18;
        }
        self.cursor_y += 12;
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
