// Feedback dashboard: per-slide stacked bars (one segment per viewing
// pass), per-student cumulative watching-time lines, one donut per
// question, and the comment list. Pure rendering of the server's
// DeckStats JSON.

import type { DeckStats } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const BAR_SCALE = 4;  // px per second
const PASS_SHADES = ['#7FB3D5', '#4A7BA6', '#2E5984', '#1B3A5C', '#102A43'];

export class Dashboard {
  private readonly host: HTMLElement;

  constructor(host: HTMLElement) {
    this.host = host;
    this.host.classList.add('dashboard');
  }

  render(stats: DeckStats): void {
    this.host.innerHTML = '';
    const hasEvents = stats.per_slide.length > 0
      || Object.keys(stats.per_student).length > 0;
    if (!hasEvents) {
      const empty = document.createElement('p');
      empty.className = 'dash-empty';
      empty.textContent = 'No viewer events yet. Share the slideshow to collect feedback.';
      this.host.appendChild(empty);
      return;
    }
    this.host.append(
      this.renderBars(stats),
      this.renderLines(stats),
      this.renderDonuts(stats),
      this.renderComments(stats),
    );
  }

  private section(title: string, cls: string): HTMLElement {
    const section = document.createElement('section');
    section.className = cls;
    const heading = document.createElement('h3');
    heading.textContent = title;
    section.appendChild(heading);
    return section;
  }

  private renderBars(stats: DeckStats): HTMLElement {
    const section = this.section('Average watching time per slide', 'dash-bars');
    const row = document.createElement('div');
    row.className = 'bar-row';
    for (const slide of stats.per_slide) {
      const wrap = document.createElement('div');
      wrap.className = 'bar';
      wrap.dataset.slideId = slide.slide_id;
      // bottom segment is the first pass; stack re-visits above it
      for (let pass = 0; pass < slide.pass_means_s.length; pass += 1) {
        const seconds = slide.pass_means_s[pass];
        const segment = document.createElement('div');
        segment.className = 'bar-segment';
        segment.dataset.pass = String(pass + 1);
        segment.dataset.seconds = String(seconds);
        segment.style.height = `${seconds * BAR_SCALE}px`;
        segment.style.background = PASS_SHADES[Math.min(pass, PASS_SHADES.length - 1)];
        segment.title = `pass ${pass + 1}: ${seconds.toFixed(1)} s`;
        wrap.prepend(segment);
      }
      const label = document.createElement('span');
      label.className = 'bar-label';
      label.textContent = slide.slide_id;
      wrap.appendChild(label);
      row.appendChild(wrap);
    }
    section.appendChild(row);
    return section;
  }

  private renderLines(stats: DeckStats): HTMLElement {
    const section = this.section('Cumulative watching time per student', 'dash-lines');
    const entries = Object.entries(stats.per_student);
    const svg = document.createElementNS(SVG_NS, 'svg');
    svg.setAttribute('viewBox', '0 0 320 140');
    svg.setAttribute('class', 'line-chart');
    const maxTime = Math.max(1, ...entries.flatMap(([, s]) => s.map((p) => p[0])));
    const maxWatch = Math.max(1, ...entries.flatMap(([, s]) => s.map((p) => p[1])));
    entries.forEach(([student, series], i) => {
      if (!series.length) return;
      const points = series
        .map(([t, w]) => `${(t / maxTime) * 300 + 10},${130 - (w / maxWatch) * 120}`)
        .join(' ');
      const line = document.createElementNS(SVG_NS, 'polyline');
      line.setAttribute('points', points);
      line.setAttribute('fill', 'none');
      line.setAttribute('class', 'student-line');
      line.setAttribute('data-student', student);
      line.setAttribute('stroke', PASS_SHADES[i % PASS_SHADES.length]);
      svg.appendChild(line);
    });
    section.appendChild(svg);
    return section;
  }

  private renderDonuts(stats: DeckStats): HTMLElement {
    const section = this.section('Question accuracy', 'dash-donuts');
    const row = document.createElement('div');
    row.className = 'donut-row';
    for (const [questionId, q] of Object.entries(stats.per_question)) {
      const figure = document.createElement('figure');
      figure.className = 'donut';
      figure.dataset.questionId = questionId;
      const svg = document.createElementNS(SVG_NS, 'svg');
      svg.setAttribute('viewBox', '0 0 42 42');
      const radius = 15.915;  // circumference 100 so dasharray works in percent
      const track = document.createElementNS(SVG_NS, 'circle');
      track.setAttribute('cx', '21');
      track.setAttribute('cy', '21');
      track.setAttribute('r', String(radius));
      track.setAttribute('class', 'donut-track');
      const arc = document.createElementNS(SVG_NS, 'circle');
      arc.setAttribute('cx', '21');
      arc.setAttribute('cy', '21');
      arc.setAttribute('r', String(radius));
      arc.setAttribute('class', 'donut-arc');
      const pct = Math.round(q.accuracy * 100);
      arc.setAttribute('stroke-dasharray', `${pct} ${100 - pct}`);
      svg.append(track, arc);
      const caption = document.createElement('figcaption');
      caption.textContent = `${questionId}: ${pct}% (${q.correct}/${q.answers})`;
      figure.append(svg, caption);
      row.appendChild(figure);
    }
    section.appendChild(row);
    return section;
  }

  private renderComments(stats: DeckStats): HTMLElement {
    const section = this.section('Comments', 'dash-comments');
    if (!stats.comments.length) {
      const none = document.createElement('p');
      none.textContent = 'No comments yet.';
      section.appendChild(none);
      return section;
    }
    const list = document.createElement('ul');
    for (const comment of stats.comments) {
      const item = document.createElement('li');
      item.textContent = `${comment.student_token}: ${comment.text}`;
      list.appendChild(item);
    }
    section.appendChild(list);
    return section;
  }
}
