"""Bundled word lists for the default keyword extractor.

Questions over form collections are short and formulaic, so a stopword
list plus a list of very common verbs separates content words (names,
offices, places, digit strings) from function words well enough for
spotting.  Both lists are lowercase; lookups happen after case folding.
"""

from __future__ import annotations

STOPWORDS = frozenset("""
a about above after again against all am an and any are aren't as at be
because been before being below between both but by can cannot could
couldn't did didn't do does doesn't doing don't down during each either
few for from further had hadn't has hasn't have haven't having he he'd
he'll he's her here here's hers herself him himself his how how's i i'd
i'll i'm i've if in into is isn't it it's its itself let's me more most
mustn't my myself neither no nor not of off on once only or other ought
our ours ourselves out over own same shan't she she'd she'll she's should
shouldn't so some such than that that's the their theirs them themselves
then there there's these they they'd they'll they're they've this those
through to too under until up very was wasn't we we'd we'll we're we've
were weren't what what's when when's where where's which while who who's
whom why why's with won't would wouldn't you you'd you'll you're you've
your yours yourself yourselves ever never also just
""".split())

COMMON_VERBS = frozenset("""
add added allow allowed appear appeared ask asked became become begin
began begun believe believed bring brought build built buy bought call
called came carry carried change changed choose chose chosen come
consider considered contain contained continue continued create created
cut decide decided die died fall fell felt fill filled find found follow
followed gave get gets getting give given go goes going gone got grew
grow grown happen happened hear heard held help helped hold include
included keep kept know knew known lead led learn learned leave left let
like liked list listed live lived look looked lose lost made make making
mark marked mean meant meet met move moved need needed offer offered open
opened pay paid pick picked place placed play played provide provided put
ran reach reached read register registered remain remained remember
remembered represent represented run running runs said saw say see seen
seem seemed select selected send sent serve served set show showed shown
sit speak spoke spoken spend spent stand stay stayed stood stop stopped
submit submitted take taken takes taking tell think thought told took try
tried turn turned understand use used wait waited walk walked want wanted
watch watched went win wish won work worked write written wrote
""".split())

LEXICON = STOPWORDS | COMMON_VERBS
