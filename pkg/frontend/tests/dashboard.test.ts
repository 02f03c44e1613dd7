// Dashboard rendering contract: bar segments per viewing pass, donut
// percentage labels, and the empty state.

import { beforeEach, describe, expect, it } from 'vitest';

import { Dashboard } from '../src/dashboard.js';
import type { DeckStats } from '../src/types.js';

function stats(partial: Partial<DeckStats>): DeckStats {
  return { per_slide: [], per_student: {}, per_question: {}, comments: [],
           ...partial };
}

describe('Dashboard', () => {
  let host: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="dash"></div>';
    host = document.getElementById('dash')!;
  });

  it('renders two bar segments for pass means [10, 5]', () => {
    new Dashboard(host).render(stats({
      per_slide: [{ slide_id: 'slide1', pass_means_s: [10, 5] }],
      per_student: { s1: [[30000, 30]] },
    }));
    const bar = host.querySelector('[data-slide-id="slide1"]')!;
    const segments = bar.querySelectorAll<HTMLElement>('.bar-segment');
    expect(segments).toHaveLength(2);
    const bySeconds = Array.from(segments, (s) => Number(s.dataset.seconds));
    expect(bySeconds).toContain(10);
    expect(bySeconds).toContain(5);
    const first = Array.from(segments).find((s) => s.dataset.pass === '1')!;
    const second = Array.from(segments).find((s) => s.dataset.pass === '2')!;
    expect(first.style.height).toBe('40px');   // 10 s at 4 px/s
    expect(second.style.height).toBe('20px');  // 5 s at 4 px/s
  });

  it('renders a 75% donut for accuracy 0.75', () => {
    new Dashboard(host).render(stats({
      per_slide: [{ slide_id: 's1', pass_means_s: [3] }],
      per_question: { q1: { answers: 4, correct: 3, accuracy: 0.75 } },
    }));
    const donut = host.querySelector('[data-question-id="q1"]')!;
    expect(donut.querySelector('figcaption')!.textContent).toContain('75%');
    expect(donut.querySelector('.donut-arc')!.getAttribute('stroke-dasharray'))
      .toBe('75 25');
  });

  it('draws one cumulative line per student', () => {
    new Dashboard(host).render(stats({
      per_slide: [{ slide_id: 's1', pass_means_s: [3] }],
      per_student: {
        s1: [[1000, 5], [2000, 12]],
        s2: [[1500, 4]],
      },
    }));
    const lines = host.querySelectorAll('.student-line');
    expect(lines).toHaveLength(2);
  });

  it('shows the empty state when there are no events', () => {
    new Dashboard(host).render(stats({}));
    expect(host.querySelector('.dash-empty')).not.toBeNull();
    expect(host.querySelectorAll('.bar')).toHaveLength(0);
  });

  it('lists comments verbatim', () => {
    new Dashboard(host).render(stats({
      per_slide: [{ slide_id: 's1', pass_means_s: [3] }],
      comments: [{ student_token: 'ps1', text: 'very clear', timestamp_ms: 1 }],
    }));
    expect(host.querySelector('.dash-comments li')!.textContent)
      .toBe('ps1: very clear');
  });
});
