#!/usr/bin/env python3
"""Generate the bundled 5-language mini-corpus, its question file, the
scorer-parity pair set, and the frozen expected answers.

Expected answers are computed by direct enumeration: every sentence of the
question's language corpus is scored with the lexical baseline and the
arg-max (ties by doc_id, sent_index) is frozen.  The generator refuses to
emit a corpus where any question's winner is ambiguous (margin < 0.1), so
the frozen answers stay robust to incidental token overlap.

Run from the repository root:  python3 scripts/gen_minicorpus.py
"""

import json
import random
import sys
from pathlib import Path

from crossqa.as2 import lexical_score
from crossqa.segmentation import split_sentences

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "data"

SEED = 20240601
N_FILLER = 51
TARGET_POSITIONS = (7, 19, 31, 43)

TERMINAL = {"ar": ".", "bn": "।", "en": ".", "ja": "。", "ru": "."}
WORD_SEP = {"ar": " ", "bn": " ", "en": " ", "ja": "", "ru": " "}

FILLER_WORDS = {
    "en": """archive beacon canal cellar desert engine farm glacier hall
        inlet jungle kiln lagoon marsh mill nook oasis orchard palace
        quarry reef shed spire stable temple terrace tunnel vault wharf
        windmill yard anchor barrel crate drum easel flag grove hedge""",
    "ru": """город музей театр север юг восток запад дорога мост лес поле
        камень здание улица площадь башня замок порт завод школа книга
        песня зима лето осень весна ветер берег сад холм остров канал
        двор склад рынок вокзал парк пруд ручей овраг""",
    "ar": """مدينة متحف مسرح شمال جنوب شرق غرب طريق جسر غابة حقل حجر مبنى
        شارع ساحة برج قلعة مصنع مدرسة كتاب أغنية شتاء صيف خريف ربيع ريح
        شاطئ حديقة تل جزيرة قناة فناء مستودع سوق محطة منتزه بركة جدول وادي
        سهل""",
    "bn": """শহর জাদুঘর থিয়েটার উত্তর দক্ষিণ পূর্ব পশ্চিম রাস্তা সেতু বন মাঠ
        পাথর ভবন সড়ক চত্বর মিনার দুর্গ কারখানা বিদ্যালয় বই গান শীত গ্রীষ্ম
        শরৎ বসন্ত বাতাস তীর বাগান টিলা দ্বীপ খাল উঠান গুদাম বাজার স্টেশন
        উদ্যান পুকুর ঝরনা উপকূল সমতল""",
    "ja": """都市 博物館 劇場 北 南 東 西 道路 森 畑 石 建物 通り 広場 塔 城
        工場 学校 本 歌 冬 夏 秋 風 岸 庭 丘 島 運河 中庭 倉庫 市場 駅 公園
        池 小道 海岸 平野 階段 窓""",
}

# four themed target documents per language; q_id suffixes a..d
TARGETS = {
    "en": [
        {
            "title": "Blue River",
            "before": "The Blue River flows across the wide northern plain.",
            "fact": "The Blue River carries seventeen golden fish to the "
                    "quiet valley every spring.",
            "after": "Fishermen gather near the old stone crossing at dawn.",
            "question": "How many golden fish does the Blue River carry to "
                        "the quiet valley?",
            "span": "seventeen golden fish",
            "span_as": "offsets",
        },
        {
            "title": "Grey Mountain",
            "before": "Grey Mountain stands at the edge of the eastern "
                      "highlands.",
            "fact": "Grey Mountain rises two thousand meters above the "
                    "frozen plateau.",
            "after": "Climbers rest in a wooden hut halfway up the slope.",
            "question": "How many meters does Grey Mountain rise above the "
                        "frozen plateau?",
            "span": "two thousand meters",
            "span_as": "text",
        },
        {
            "title": "Lantern Festival",
            "before": "Every town on the coast keeps its own calendar of "
                      "celebrations.",
            "fact": "The Lantern Festival begins on the ninth evening of "
                    "winter in the small port town.",
            "after": "Visitors carry paper lights along the water all "
                     "night.",
            "question": "When does the Lantern Festival begin in the small "
                        "port town?",
            "span": "the ninth evening of winter",
            "span_as": "offsets",
        },
        {
            "title": "Round Library",
            "before": "Scholars travel far to study in the reading rooms.",
            "fact": "The Round Library keeps four thousand ancient maps "
                    "beneath its copper dome.",
            "after": "A narrow staircase leads to the archive basement.",
            "question": "How many ancient maps does the Round Library keep "
                        "beneath its copper dome?",
            "span": "four thousand ancient maps",
            "span_as": "text",
        },
    ],
    "ru": [
        {
            "title": "Синяя река",
            "before": "Синяя река течёт через широкую северную равнину.",
            "fact": "Синяя река приносит семнадцать золотых рыб в тихую "
                    "долину каждой весной.",
            "after": "Рыбаки собираются у старой каменной переправы на "
                     "рассвете.",
            "question": "Сколько золотых рыб приносит Синяя река в тихую "
                        "долину?",
            "span": "семнадцать золотых рыб",
            "span_as": "offsets",
        },
        {
            "title": "Серая гора",
            "before": "Серая гора стоит на краю восточного нагорья.",
            "fact": "Серая гора поднимается на две тысячи метров над "
                    "замёрзшим плато.",
            "after": "Альпинисты отдыхают в деревянной хижине на склоне.",
            "question": "На сколько метров поднимается Серая гора над "
                        "замёрзшим плато?",
            "span": "две тысячи метров",
            "span_as": "text",
        },
        {
            "title": "Праздник фонарей",
            "before": "Каждый прибрежный городок хранит свой календарь "
                      "торжеств.",
            "fact": "Праздник фонарей начинается в девятый вечер зимы в "
                    "маленьком портовом городке.",
            "after": "Гости несут бумажные огни вдоль воды всю ночь.",
            "question": "Когда начинается Праздник фонарей в маленьком "
                        "портовом городке?",
            "span": "девятый вечер зимы",
            "span_as": "offsets",
        },
        {
            "title": "Круглая библиотека",
            "before": "Учёные издалека приезжают работать в читальных "
                      "залах.",
            "fact": "Круглая библиотека хранит четыре тысячи старинных карт "
                    "под медным куполом.",
            "after": "Узкая лестница ведёт в подвал архива.",
            "question": "Сколько старинных карт хранит Круглая библиотека "
                        "под медным куполом?",
            "span": "четыре тысячи старинных карт",
            "span_as": "text",
        },
    ],
    "ar": [
        {
            "title": "النهر الأزرق",
            "before": "يجري النهر الأزرق عبر السهل الشمالي الواسع.",
            "fact": "يحمل النهر الأزرق سبع عشرة سمكة ذهبية إلى الوادي "
                    "الهادئ في كل ربيع.",
            "after": "يجتمع الصيادون عند المعبر الحجري القديم عند الفجر.",
            "question": "كم سمكة ذهبية يحمل النهر الأزرق إلى الوادي الهادئ؟",
            "span": "سبع عشرة سمكة ذهبية",
            "span_as": "offsets",
        },
        {
            "title": "الجبل الرمادي",
            "before": "يقف الجبل الرمادي عند حافة المرتفعات الشرقية.",
            "fact": "يرتفع الجبل الرمادي ألفي متر فوق الهضبة المتجمدة.",
            "after": "يستريح المتسلقون في كوخ خشبي في منتصف المنحدر.",
            "question": "كم متر يرتفع الجبل الرمادي فوق الهضبة المتجمدة؟",
            "span": "ألفي متر",
            "span_as": "text",
        },
        {
            "title": "مهرجان الفوانيس",
            "before": "تحتفظ كل بلدة ساحلية بتقويم احتفالاتها الخاص.",
            "fact": "يبدأ مهرجان الفوانيس في المساء التاسع من الشتاء في "
                    "البلدة الساحلية الصغيرة.",
            "after": "يحمل الزوار أضواء ورقية على طول الماء طوال الليل.",
            "question": "متى يبدأ مهرجان الفوانيس في البلدة الساحلية "
                        "الصغيرة؟",
            "span": "المساء التاسع من الشتاء",
            "span_as": "offsets",
        },
        {
            "title": "المكتبة المستديرة",
            "before": "يسافر الدارسون من بعيد للعمل في قاعات القراءة.",
            "fact": "تحفظ المكتبة المستديرة أربعة آلاف خريطة قديمة تحت "
                    "القبة النحاسية.",
            "after": "يقود درج ضيق إلى قبو الأرشيف.",
            "question": "كم خريطة قديمة تحفظ المكتبة المستديرة تحت القبة "
                        "النحاسية؟",
            "span": "أربعة آلاف خريطة قديمة",
            "span_as": "text",
        },
    ],
    "bn": [
        {
            "title": "নীল নদী",
            "before": "নীল নদী প্রশস্ত উত্তরের সমভূমির মধ্য দিয়ে বয়ে যায়।",
            "fact": "নীল নদী প্রতি বসন্তে সতেরোটি সোনালি মাছ শান্ত "
                    "উপত্যকায় নিয়ে যায়।",
            "after": "জেলেরা ভোরে পুরনো পাথরের পারাপারে জড়ো হয়।",
            "question": "নীল নদী শান্ত উপত্যকায় কতটি সোনালি মাছ নিয়ে "
                        "যায়?",
            "span": "সতেরোটি সোনালি মাছ",
            "span_as": "offsets",
        },
        {
            "title": "ধূসর পাহাড়",
            "before": "ধূসর পাহাড় পূর্ব উচ্চভূমির প্রান্তে দাঁড়িয়ে আছে।",
            "fact": "ধূসর পাহাড় হিমায়িত মালভূমির উপরে দুই হাজার মিটার "
                    "উঁচু হয়ে ওঠে।",
            "after": "আরোহীরা ঢালের মাঝপথে কাঠের কুটিরে বিশ্রাম নেয়।",
            "question": "ধূসর পাহাড় হিমায়িত মালভূমির উপরে কত মিটার উঁচু "
                        "হয়ে ওঠে?",
            "span": "দুই হাজার মিটার",
            "span_as": "text",
        },
        {
            "title": "লণ্ঠন উৎসব",
            "before": "উপকূলের প্রতিটি শহর নিজের উৎসবের পঞ্জিকা রাখে।",
            "fact": "লণ্ঠন উৎসব ছোট বন্দর শহরে শীতের নবম সন্ধ্যায় শুরু "
                    "হয়।",
            "after": "দর্শনার্থীরা সারা রাত জলের ধারে কাগজের আলো বহন করে।",
            "question": "লণ্ঠন উৎসব ছোট বন্দর শহরে কখন শুরু হয়?",
            "span": "শীতের নবম সন্ধ্যায়",
            "span_as": "offsets",
        },
        {
            "title": "গোল গ্রন্থাগার",
            "before": "পণ্ডিতেরা পাঠকক্ষে কাজ করতে দূর থেকে আসেন।",
            "fact": "গোল গ্রন্থাগার তামার গম্বুজের নিচে চার হাজার পুরানো "
                    "মানচিত্র রাখে।",
            "after": "একটি সরু সিঁড়ি মহাফেজখানার ভূগর্ভে নামে।",
            "question": "গোল গ্রন্থাগার তামার গম্বুজের নিচে কতটি পুরানো "
                        "মানচিত্র রাখে?",
            "span": "চার হাজার পুরানো মানচিত্র",
            "span_as": "text",
        },
    ],
    "ja": [
        {
            "title": "青い川",
            "before": "青い川は広い北の平野を流れる。",
            "fact": "青い川は毎年春に十七匹の金色の魚を静かな谷へ運ぶ。",
            "after": "漁師たちは夜明けに古い石の渡し場に集まる。",
            "question": "青い川は静かな谷へ何匹の金色の魚を運ぶか。",
            "span": "十七匹の金色の魚",
            "span_as": "offsets",
        },
        {
            "title": "灰色の山",
            "before": "灰色の山は東の高地の端に立っている。",
            "fact": "灰色の山は凍った高原の上に二千メートルそびえる。",
            "after": "登山者は斜面の途中の木の小屋で休む。",
            "question": "灰色の山は凍った高原の上に何メートルそびえるか。",
            "span": "二千メートル",
            "span_as": "text",
        },
        {
            "title": "灯籠祭り",
            "before": "海辺の町はそれぞれ祝いの暦を持っている。",
            "fact": "灯籠祭りは小さな港町で冬の九番目の夜に始まる。",
            "after": "訪れる人は一晩中水辺で紙の明かりを運ぶ。",
            "question": "灯籠祭りは小さな港町でいつ始まるか。",
            "span": "冬の九番目の夜",
            "span_as": "offsets",
        },
        {
            "title": "丸い図書館",
            "before": "学者たちは閲覧室で働くために遠くから来る。",
            "fact": "丸い図書館は銅の丸屋根の下に四千枚の古い地図を保管する。",
            "after": "狭い階段が書庫の地下へ続いている。",
            "question": "丸い図書館は銅の丸屋根の下に何枚の古い地図を保管"
                        "するか。",
            "span": "四千枚の古い地図",
            "span_as": "text",
        },
    ],
}

LANGS = ("ar", "bn", "en", "ja", "ru")


def filler_doc(lang, rng, i, words):
    sep = WORD_SEP[lang]
    term = TERMINAL[lang]
    title = f"{rng.choice(words)} {rng.choice(words)} {i}"
    sents = []
    for _ in range(3):
        n = rng.randint(4, 7)
        sents.append(sep.join(rng.choice(words) for _ in range(n)) + term)
    joiner = "" if lang == "ja" else " "
    return {"title": title, "text": joiner.join(sents)}


def target_doc(lang, spec):
    joiner = "" if lang == "ja" else " "
    body = joiner.join([spec["before"], spec["fact"], spec["after"]])
    return {"title": spec["title"], "text": body}


def build_language(lang, rng):
    words = FILLER_WORDS[lang].split()
    records = []
    targets = list(TARGETS[lang])
    t = 0
    i = 0
    while len(records) < N_FILLER + len(targets):
        if t < len(targets) and len(records) == TARGET_POSITIONS[t]:
            records.append(target_doc(lang, targets[t]))
            t += 1
        else:
            records.append(filler_doc(lang, rng, i, words))
            i += 1
    assert t == len(targets)
    return records


def build_questions(lang, records):
    questions = []
    for k, spec in enumerate(TARGETS[lang]):
        passage = spec["fact"]
        pos = passage.find(spec["span"])
        assert pos >= 0, (lang, spec["span"])
        q = {
            "q_id": f"{lang}-{chr(ord('a') + k)}",
            "text": spec["question"],
            "lang": lang,
            "gold_doc_title": spec["title"],
            "gold_passage": passage,
            "reference_answer": spec["fact"],
        }
        if spec["span_as"] == "offsets":
            q["gold_span"] = {"start": pos, "end": pos + len(spec["span"])}
        else:
            q["gold_span"] = spec["span"]
        questions.append(q)
    return questions


def oracle_expected(questions, corpora):
    """Best lexical-score sentence per question by direct enumeration."""
    expected = {}
    for q in questions:
        lang = q["lang"]
        scored = []
        for doc_id, rec in enumerate(corpora[lang]):
            for sent in split_sentences(rec["text"], lang):
                s = lexical_score(q["text"], sent.text, lang, lang)
                scored.append((-s, doc_id, sent.sent_index, sent.text))
        scored.sort()
        best = scored[0]
        runner = scored[1]
        margin = -best[0] - -runner[0]
        if margin < 0.1:
            raise SystemExit(
                f"ambiguous fixture for {q['q_id']}: top={-best[0]:.3f} "
                f"{best[3]!r} runner={-runner[0]:.3f} {runner[3]!r}")
        expected[q["q_id"]] = {
            "lang": lang,
            "answer": best[3],
            "doc_id": best[1],
            "sent_index": best[2],
            "score": -best[0],
        }
    return expected


def build_parity_pairs(questions, corpora, rng):
    pairs = []
    sentences = {lang: [] for lang in LANGS}
    for lang in LANGS:
        for rec in corpora[lang]:
            for sent in split_sentences(rec["text"], lang):
                sentences[lang].append(sent.text)
    for q in questions:
        lang = q["lang"]
        pairs.append({"question": q["text"], "q_lang": lang,
                      "candidate": rng.choice(sentences[lang]),
                      "c_lang": lang})
        pairs.append({"question": q["text"], "q_lang": lang,
                      "candidate": q["reference_answer"], "c_lang": lang})
        for other in LANGS:
            if other != lang:
                pairs.append({"question": q["text"], "q_lang": lang,
                              "candidate": rng.choice(sentences[other]),
                              "c_lang": other})
    # identity pairs touch score == 1.0 exactly
    for lang in LANGS:
        for _ in range(6):
            s = rng.choice(sentences[lang])
            pairs.append({"question": s, "q_lang": lang, "candidate": s,
                          "c_lang": lang})
    # NFKC/width/case edge content
    extras = [
        ("Ｗｈａｔ ｉｓ ＢＭ２５?", "en", "what is bm25 exactly", "en"),
        ("①②③ units", "en", "123 units of measure", "en"),
        ("ｶﾀｶﾅ ﾃｽﾄ", "ja", "カタカナ テスト", "ja"),
        ("Straße im Dorf", "en", "strasse im dorf", "en"),
        ("ОДИН ДВА ТРИ", "ru", "один два три четыре", "ru"),
    ]
    for qt, ql, ct, cl in extras:
        pairs.append({"question": qt, "q_lang": ql, "candidate": ct,
                      "c_lang": cl})
    while len(pairs) < 200:
        ql = rng.choice(LANGS)
        cl = rng.choice(LANGS)
        pairs.append({"question": rng.choice(sentences[ql]), "q_lang": ql,
                      "candidate": rng.choice(sentences[cl]), "c_lang": cl})
    assert len(pairs) >= 200
    return pairs[:200]


def main():
    rng = random.Random(SEED)
    corpora = {}
    mini = OUT / "minicorpus"
    mini.mkdir(parents=True, exist_ok=True)
    for lang in LANGS:
        corpora[lang] = build_language(lang, rng)
        with open(mini / f"{lang}.jsonl", "w", encoding="utf-8") as f:
            for rec in corpora[lang]:
                f.write(json.dumps(rec, ensure_ascii=False,
                                   sort_keys=True) + "\n")
        print(f"{lang}: {len(corpora[lang])} docs")

    questions = []
    for lang in LANGS:
        questions.extend(build_questions(lang, corpora[lang]))
    with open(mini / "questions.jsonl", "w", encoding="utf-8") as f:
        for q in questions:
            f.write(json.dumps(q, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"questions: {len(questions)}")

    expected = oracle_expected(questions, corpora)
    with open(mini / "expected_answers.json", "w", encoding="utf-8") as f:
        json.dump(expected, f, ensure_ascii=False, sort_keys=True, indent=1)
        f.write("\n")
    print("expected answers frozen")

    pairs = build_parity_pairs(questions, corpora, random.Random(SEED + 1))
    with open(OUT / "parity_pairs.jsonl", "w", encoding="utf-8") as f:
        for p in pairs:
            f.write(json.dumps(p, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"parity pairs: {len(pairs)}")


if __name__ == "__main__":
    sys.exit(main())
